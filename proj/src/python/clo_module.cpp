#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <random>

#include "clo/alg_io.hpp"
#include "clo/algebra.hpp"
#include "clo/constructions.hpp"
#include "clo/logic.hpp"
#include "clo/term.hpp"

namespace py = pybind11;

namespace {

clo::Subset to_subset(const clo::Algebra& a,
                      const std::vector<std::string>& names) {
  clo::Subset s;
  for (const auto& n : names) s.push_back(a.require_index(n));
  return clo::sorted_unique(std::move(s));
}

clo::Morphism to_morphism(const clo::Algebra& a,
                          const std::map<std::string, std::string>& letters) {
  clo::Morphism h;
  h.target = a;
  for (const auto& [letter, element] : letters)
    h.letters[letter] = a.require_index(element);
  return h;
}

clo::Recognizer to_recognizer(const clo::Algebra& a,
                              const std::map<std::string, std::string>& letters,
                              const std::vector<std::string>& accepting) {
  return clo::Recognizer{to_morphism(a, letters), to_subset(a, accepting)};
}

py::dict report_to_dict(const clo::PropertyReport& rep) {
  py::dict out;
  out["subject"] = rep.subject;
  out["passed"] = rep.all_passed();
  py::list checks;
  for (const auto& c : rep.checks) {
    py::dict d;
    d["name"] = c.name;
    d["passed"] = c.passed;
    d["witness"] = c.witness;
    checks.append(std::move(d));
  }
  out["checks"] = std::move(checks);
  return out;
}

std::string word_str(const clo::Word& w) {
  std::string out;
  for (const auto& c : w) out += c;
  return out;
}

clo::Word str_word(const std::string& s) {
  clo::Word w;
  for (char c : s) w.push_back(std::string(1, c));
  return w;
}

}  // namespace

PYBIND11_MODULE(clo, m) {
  m.doc() = "finite algebras of countable words: identities, constructions, "
            "term evaluation and logic compilers";

  py::register_exception<clo::Error>(m, "CloError");

  py::class_<clo::Algebra>(m, "Algebra")
      .def_property_readonly("label", &clo::Algebra::label)
      .def_property_readonly("size", &clo::Algebra::size)
      .def_property_readonly("elements",
                             [](const clo::Algebra& a) { return a.names(); })
      .def_property_readonly(
          "unit", [](const clo::Algebra& a) { return a.name_of(a.unit()); })
      .def("mul",
           [](const clo::Algebra& a, const std::string& x,
              const std::string& y) {
             return a.name_of(a.mul(a.require_index(x), a.require_index(y)));
           })
      .def("omega",
           [](const clo::Algebra& a, const std::string& x) {
             return a.name_of(a.omega(a.require_index(x)));
           })
      .def("omegastar",
           [](const clo::Algebra& a, const std::string& x) {
             return a.name_of(a.omegastar(a.require_index(x)));
           })
      .def("shuffle",
           [](const clo::Algebra& a, const std::vector<std::string>& subset) {
             return a.name_of(a.shuffle(to_subset(a, subset)));
           })
      .def("idempotent_power",
           [](const clo::Algebra& a, const std::string& x) {
             return a.name_of(a.idem_power(a.require_index(x)));
           })
      .def("gamma",
           [](const clo::Algebra& a, const std::string& x, int n) {
             return a.name_of(a.gamma(a.require_index(x), n));
           })
      .def("gnl", &clo::Algebra::gnl)
      .def("iterated_idempotents",
           [](const clo::Algebra& a, int n) {
             std::vector<std::string> out;
             for (int e : a.iterated_idempotents(n))
               out.push_back(a.name_of(e));
             return out;
           })
      .def("__repr__", [](const clo::Algebra& a) {
        return "<Algebra " + a.label() + " size=" + std::to_string(a.size()) +
               ">";
      });

  m.def("builtin", &clo::builtin, py::arg("spec"));
  m.def("load_algebra", &clo::load_algebra_file, py::arg("path"),
        py::arg("validate") = true);
  m.def("save_algebra", &clo::save_algebra_text, py::arg("algebra"));
  m.def("validate_axioms", [](const clo::Algebra& a) {
    return report_to_dict(clo::validate_axioms(a));
  });
  m.def("check_identity", [](const clo::Algebra& a, const std::string& tag) {
    return report_to_dict(clo::check_identity(a, clo::Identity::parse(tag)));
  });
  m.def("green", [](const clo::Algebra& a) {
    auto g = clo::green_relations(a);
    auto render = [&](const std::vector<std::vector<int>>& classes) {
      std::vector<std::vector<std::string>> out;
      for (const auto& cls : classes) {
        std::vector<std::string> names;
        for (int x : cls) names.push_back(a.name_of(x));
        out.push_back(std::move(names));
      }
      return out;
    };
    py::dict d;
    d["j"] = render(g.j_classes);
    d["r"] = render(g.r_classes);
    d["l"] = render(g.l_classes);
    d["h"] = render(g.h_classes);
    d["j_trivial"] = g.j_trivial();
    return d;
  });

  m.def("direct_product", &clo::direct_product);
  m.def("generated_subalgebra",
        [](const clo::Algebra& a, const std::vector<std::string>& gens) {
          return clo::generated_subalgebra(a, to_subset(a, gens));
        });
  m.def("is_isomorphic", &clo::is_isomorphic);
  m.def("divides", [](const clo::Algebra& a, const clo::Algebra& b) {
    auto r = clo::divides(a, b);
    py::dict d;
    d["decision"] = r.decision == clo::Decision::Yes   ? "yes"
                    : r.decision == clo::Decision::No ? "no"
                                                       : "unknown";
    if (r.witness) {
      std::vector<std::string> sub;
      for (int x : r.witness->subalgebra) sub.push_back(b.name_of(x));
      d["subalgebra"] = sub;
    }
    return d;
  });

  py::class_<clo::BlockProduct>(m, "BlockProduct")
      .def_readonly("algebra", &clo::BlockProduct::algebra)
      .def_readonly("left", &clo::BlockProduct::left)
      .def_readonly("right", &clo::BlockProduct::right)
      .def("m_of", [](const clo::BlockProduct& bp, const std::string& e) {
        return bp.left.name_of(bp.m_of(bp.algebra.require_index(e)));
      });
  m.def("block_product", &clo::block_product);
  m.def(
      "block_product_random",
      [](const clo::Algebra& a, const clo::Algebra& b, int gens,
         unsigned seed) {
        std::mt19937 rng(seed);
        return clo::block_product_generated(
            a, b, clo::random_block_generators(a, b, gens, rng));
      },
      py::arg("left"), py::arg("right"), py::arg("generators"),
      py::arg("seed") = 1);

  m.def("syntactic_quotient",
        [](const clo::Algebra& a,
           const std::map<std::string, std::string>& letters,
           const std::vector<std::string>& accepting) {
          auto q =
              clo::syntactic_quotient(to_recognizer(a, letters, accepting));
          py::dict d;
          d["quotient"] = q.quotient;
          std::vector<std::string> acc;
          for (int e : q.recognizer.accepting)
            acc.push_back(q.quotient.name_of(e));
          d["accepting"] = acc;
          return d;
        });

  py::class_<clo::SnAlgebra>(m, "SnAlgebra")
      .def_readonly("algebra", &clo::SnAlgebra::algebra)
      .def_readonly("bound", &clo::SnAlgebra::bound)
      .def_property_readonly("witnesses", [](const clo::SnAlgebra& sn) {
        std::vector<std::string> out;
        for (const auto& w : sn.witnesses) out.push_back(word_str(w));
        return out;
      });
  m.def("build_sn", [](const std::string& alphabet, int n) {
    std::vector<std::string> sigma;
    for (char c : alphabet) sigma.push_back(std::string(1, c));
    return clo::build_sn(sigma, n);
  });

  // --- terms ----------------------------------------------------------------
  m.def("parse_term", [](const std::string& s) {
    return clo::format_term(clo::parse_term(s));
  });
  m.def("eval_term",
        [](const clo::Algebra& a,
           const std::map<std::string, std::string>& letters,
           const std::string& term) {
          auto h = to_morphism(a, letters);
          return a.name_of(clo::eval_term(clo::parse_term(term), h));
        });
  m.def("subword_class", [](const std::string& term, int n) {
    std::vector<std::string> out;
    for (const auto& w : clo::subword_class(clo::parse_term(term), n))
      out.push_back(word_str(w));
    return out;
  });
  m.def("finite_witness", [](const std::string& term, int n) {
    return word_str(clo::finite_witness(clo::parse_term(term), n));
  });
  m.def("rank_of", [](const std::string& term, const std::string& letters) {
    std::set<std::string> a;
    for (char c : letters) a.insert(std::string(1, c));
    return clo::rank_of(clo::parse_term(term), a).str();
  });
  m.def("directed_rank",
        [](const std::string& term, const std::string& letter,
           const std::string& direction) {
          auto dir = direction == "w" ? clo::Direction::Omega
                                      : clo::Direction::OmegaStar;
          return clo::directed_rank(clo::parse_term(term), letter, dir).str();
        });
  m.def("transduce",
        [](const clo::Algebra& a,
           const std::map<std::string, std::string>& letters,
           const std::string& term) {
          auto h = to_morphism(a, letters);
          auto t = clo::normalize_powers(clo::parse_term(term), h);
          return clo::format_term(clo::transduce(t, h));
        });
  m.def("member",
        [](const clo::Algebra& a,
           const std::map<std::string, std::string>& letters,
           const std::vector<std::string>& accepting,
           const std::string& term) {
          return clo::member(clo::parse_term(term),
                             to_recognizer(a, letters, accepting));
        });

  // --- logic ------------------------------------------------------------------
  m.def("parse_formula", [](const std::string& s) {
    return clo::format_formula(clo::parse_formula(s));
  });
  m.def("fragment_of", [](const std::string& formula) {
    auto tag = clo::fragment_of(clo::parse_formula(formula));
    py::dict d;
    d["fo1"] = tag.fo1;
    d["bsigma1"] = tag.bsigma1;
    d["one_variable"] = tag.one_variable;
    d["foi"] = tag.foi;
    d["directed"] = tag.directed;
    return d;
  });
  m.def("mc_finite", [](const std::string& word, const std::string& formula) {
    return clo::mc_finite(str_word(word), clo::parse_formula(formula));
  });
  m.def("mc_term", [](const std::string& term, const std::string& formula) {
    return clo::mc_term_onevar(clo::parse_term(term),
                               clo::parse_formula(formula));
  });
  m.def("relativize",
        [](const std::string& formula, const std::string& pivot,
           const std::string& side) {
          auto s = side == "below" ? clo::Side::Below : clo::Side::Above;
          return clo::format_formula(
              clo::relativize(clo::parse_formula(formula), pivot, s));
        });

  py::class_<clo::Compiled>(m, "Compiled")
      .def_property_readonly(
          "target",
          [](const clo::Compiled& c) { return c.recognizer.h.target; })
      .def_property_readonly("accepting",
                             [](const clo::Compiled& c) {
                               std::vector<std::string> out;
                               for (int e : c.recognizer.accepting)
                                 out.push_back(
                                     c.recognizer.h.target.name_of(e));
                               return out;
                             })
      .def("member",
           [](const clo::Compiled& c, const std::string& term) {
             return clo::member(clo::parse_term(term), c.recognizer);
           })
      .def("member_via_bpp",
           [](const clo::Compiled& c, const std::string& term) {
             return clo::member_via_bpp(clo::parse_term(term), c);
           });
  m.def(
      "compile",
      [](const std::string& formula, const std::string& strategy,
         const std::string& alphabet) {
        std::vector<std::string> sigma;
        for (char c : alphabet) sigma.push_back(std::string(1, c));
        return clo::compile(clo::parse_formula(formula),
                            clo::parse_strategy(strategy), sigma);
      },
      py::arg("formula"), py::arg("strategy"), py::arg("alphabet") = "");
}
