#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "clo/alg_io.hpp"
#include "clo/algebra.hpp"
#include "clo/constructions.hpp"
#include "clo/logic.hpp"
#include "clo/term.hpp"

namespace {

using clo::Algebra;

enum ExitCode { kOk = 0, kNegative = 1, kFailure = 2 };

// flat report that renders as text, tsv or json
struct Report {
  nlohmann::ordered_json data = nlohmann::ordered_json::object();

  void set(const std::string& key, const nlohmann::ordered_json& value) {
    data[key] = value;
  }

  void print(const std::string& format) const {
    if (format == "json") {
      std::cout << data.dump(2) << "\n";
      return;
    }
    for (const auto& [key, value] : data.items()) {
      std::string rendered =
          value.is_string() ? value.get<std::string>() : value.dump();
      if (format == "tsv")
        std::cout << key << "\t" << rendered << "\n";
      else
        std::cout << key << ": " << rendered << "\n";
    }
  }
};

struct AlgebraInput {
  std::string builtin;
  std::string file;
  bool no_validate = false;

  void attach(CLI::App* cmd) {
    auto* b = cmd->add_option("--builtin", builtin,
                              "builtin algebra, e.g. u1, gap, delta:2");
    auto* f = cmd->add_option("--file", file, "path to an .alg file");
    b->excludes(f);
    cmd->add_flag("--no-validate", no_validate,
                  "skip axiom validation when loading a file");
  }

  Algebra load() const {
    if (!builtin.empty()) return clo::builtin(builtin);
    if (!file.empty()) return clo::load_algebra_file(file, !no_validate);
    throw clo::Error("give an algebra with --builtin or --file");
  }
};

// spec strings for binary subcommands: builtin name or .alg path
Algebra load_spec(const std::string& spec, bool validate) {
  if (spec.find('/') != std::string::npos ||
      (spec.size() > 4 && spec.substr(spec.size() - 4) == ".alg"))
    return clo::load_algebra_file(spec, validate);
  return clo::builtin(spec);
}

clo::Morphism parse_map(const Algebra& a,
                        const std::vector<std::string>& items) {
  clo::Morphism h;
  h.target = a;
  for (const auto& group : items) {
    std::stringstream ss(group);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      auto eq = item.find('=');
      if (eq == std::string::npos)
        throw clo::Error("--map entries look like letter=element");
      std::string letter = item.substr(0, eq);
      h.letters[letter] = a.require_index(item.substr(eq + 1));
    }
  }
  return h;
}

std::vector<int> parse_elements(const Algebra& a, const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(a.require_index(item));
  return clo::sorted_unique(std::move(out));
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw clo::Error("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  // trim trailing whitespace so files may end with a newline
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
    text.pop_back();
  return text;
}

// a term either inline (--term) or from a .term file (--term-file)
struct TermInput {
  std::string inline_text;
  std::string file;

  void attach(CLI::App* cmd, bool required = true) {
    auto* t = cmd->add_option("--term", inline_text, "term text");
    auto* f = cmd->add_option("--term-file", file, "path to a .term file");
    t->excludes(f);
    if (required) {
      // one of the two must be present; checked at use
    }
  }

  clo::TermPtr parse() const {
    if (!inline_text.empty()) return clo::parse_term(inline_text);
    if (!file.empty()) return clo::parse_term(slurp(file));
    throw clo::Error("give a term with --term or --term-file");
  }
  bool present() const { return !inline_text.empty() || !file.empty(); }
};

nlohmann::ordered_json report_json(const clo::PropertyReport& rep) {
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const auto& c : rep.checks) {
    nlohmann::ordered_json j{{"name", c.name}, {"passed", c.passed}};
    if (!c.witness.empty()) j["witness"] = c.witness;
    if (!c.detail.empty()) j["detail"] = c.detail;
    checks.push_back(std::move(j));
  }
  return checks;
}

std::string green_summary(const clo::GreenRelations& g, const Algebra& a) {
  std::string out;
  for (const auto& cls : g.j_classes) {
    out += "{";
    for (std::size_t i = 0; i < cls.size(); ++i) {
      if (i) out += " ";
      out += a.name_of(cls[i]);
    }
    out += "} ";
  }
  if (!out.empty()) out.pop_back();
  return out;
}

clo::Word parse_word(const std::string& s) {
  clo::Word w;
  for (char c : s) w.push_back(std::string(1, c));
  return w;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite algebras of countable words: decision procedures, "
               "constructions and logic compilers"};
  app.require_subcommand(1);
  std::string format = "text";
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"text", "tsv", "json"}))
      ->capture_default_str();

  Report report;
  int exit_code = kOk;

  // validate -----------------------------------------------------------
  AlgebraInput validate_in;
  auto* c_validate = app.add_subcommand("validate", "check the algebra axioms");
  validate_in.attach(c_validate);
  c_validate->callback([&] {
    Algebra a = [&] {
      if (!validate_in.builtin.empty()) return clo::builtin(validate_in.builtin);
      return clo::load_algebra_file(validate_in.file, false);
    }();
    auto rep = clo::validate_axioms(a);
    report.set("algebra", a.label());
    report.set("passed", rep.all_passed());
    report.set("checks", report_json(rep));
    if (!rep.all_passed()) exit_code = kNegative;
  });

  // classify -----------------------------------------------------------
  AlgebraInput classify_in;
  auto* c_classify = app.add_subcommand(
      "classify", "identity checks, Green summary and gap-nesting length");
  classify_in.attach(c_classify);
  int classify_gi = 1;
  c_classify->add_option("--gi-level", classify_gi,
                         "level for the gap-insensitivity check");
  c_classify->callback([&] {
    Algebra a = classify_in.load();
    report.set("algebra", a.label());
    for (const char* tag :
         {"commutative", "idempotent", "aperiodic", "j_trivial",
          "shuffle_trivial", "shuffle_power_trivial"}) {
      auto rep = clo::check_identity(a, clo::Identity::parse(tag));
      report.set(tag, rep.all_passed());
    }
    auto gi = clo::check_identity(
        a, clo::Identity{clo::IdentityKind::GapInsensitive, classify_gi});
    report.set("gi(" + std::to_string(classify_gi) + ")", gi.all_passed());
    auto g = clo::green_relations(a);
    report.set("j_classes", green_summary(g, a));
    report.set("gnl", a.gnl());
  });

  // green ----------------------------------------------------------------
  AlgebraInput green_in;
  auto* c_green = app.add_subcommand("green", "Green's relations");
  green_in.attach(c_green);
  c_green->callback([&] {
    Algebra a = green_in.load();
    auto g = clo::green_relations(a);
    report.set("algebra", a.label());
    report.set("j_classes", green_summary(g, a));
    auto render = [&](const std::vector<std::vector<int>>& classes) {
      std::string out;
      for (const auto& cls : classes) {
        out += "{";
        for (std::size_t i = 0; i < cls.size(); ++i)
          out += (i ? " " : "") + a.name_of(cls[i]);
        out += "} ";
      }
      if (!out.empty()) out.pop_back();
      return out;
    };
    report.set("r_classes", render(g.r_classes));
    report.set("l_classes", render(g.l_classes));
    report.set("h_classes", render(g.h_classes));
    report.set("j_trivial", g.j_trivial());
  });

  // gnl / gamma -----------------------------------------------------------
  AlgebraInput gnl_in;
  auto* c_gnl = app.add_subcommand("gnl", "gap-nesting length");
  gnl_in.attach(c_gnl);
  c_gnl->callback([&] {
    Algebra a = gnl_in.load();
    report.set("gnl", a.gnl());
  });

  AlgebraInput gamma_in;
  std::string gamma_element;
  int gamma_n = 1;
  auto* c_gamma = app.add_subcommand("gamma", "iterated gap power of an element");
  gamma_in.attach(c_gamma);
  c_gamma->add_option("--element", gamma_element)->required();
  c_gamma->add_option("--n", gamma_n)->required();
  c_gamma->callback([&] {
    Algebra a = gamma_in.load();
    report.set("gamma",
               a.name_of(a.gamma(a.require_index(gamma_element), gamma_n)));
  });

  // product / blockproduct / subalg / quotient / divides -------------------
  std::string left_spec, right_spec, out_path;
  auto* c_product = app.add_subcommand("product", "direct product");
  c_product->add_option("--left", left_spec)->required();
  c_product->add_option("--right", right_spec)->required();
  c_product->add_option("--out", out_path, "write the result as .alg");
  c_product->callback([&] {
    Algebra p = clo::direct_product(load_spec(left_spec, true),
                                    load_spec(right_spec, true));
    report.set("algebra", p.label());
    report.set("size", p.size());
    if (!out_path.empty()) clo::save_algebra_file(p, out_path);
  });

  std::string bp_left, bp_right, bp_out;
  int bp_gens = 0;
  unsigned bp_seed = 1;
  bool bp_full = false;
  auto* c_bp = app.add_subcommand("blockproduct",
                                  "block product (full or generated carrier)");
  c_bp->add_option("--left", bp_left)->required();
  c_bp->add_option("--right", bp_right)->required();
  c_bp->add_flag("--full", bp_full, "materialize the full carrier");
  c_bp->add_option("--gens", bp_gens, "number of random generators");
  c_bp->add_option("--seed", bp_seed, "generator seed");
  c_bp->add_option("--out", bp_out);
  c_bp->callback([&] {
    Algebra m = load_spec(bp_left, true);
    Algebra n = load_spec(bp_right, true);
    clo::BlockProduct bp;
    if (bp_full || bp_gens <= 0) {
      bp = clo::block_product(m, n);
    } else {
      std::mt19937 rng(bp_seed);
      bp = clo::block_product_generated(
          m, n, clo::random_block_generators(m, n, bp_gens, rng));
    }
    report.set("algebra", bp.algebra.label());
    report.set("size", bp.algebra.size());
    report.set("gnl", bp.algebra.gnl());
    if (!bp_out.empty()) clo::save_algebra_file(bp.algebra, bp_out);
  });

  AlgebraInput subalg_in;
  std::string subalg_gens, subalg_out;
  auto* c_subalg = app.add_subcommand("subalg", "generated subalgebra");
  subalg_in.attach(c_subalg);
  c_subalg->add_option("--gens", subalg_gens, "comma-separated elements")
      ->required();
  c_subalg->add_option("--out", subalg_out);
  c_subalg->callback([&] {
    Algebra a = subalg_in.load();
    Algebra sub = clo::generated_subalgebra(a, parse_elements(a, subalg_gens));
    report.set("algebra", sub.label());
    report.set("size", sub.size());
    nlohmann::ordered_json elems = nlohmann::ordered_json::array();
    for (const auto& name : sub.names()) elems.push_back(name);
    report.set("elements", elems);
    if (!subalg_out.empty()) clo::save_algebra_file(sub, subalg_out);
  });

  AlgebraInput quot_in;
  std::vector<std::string> quot_map;
  std::string quot_accepting, quot_out;
  auto* c_quot = app.add_subcommand(
      "quotient", "syntactic quotient of a recognizer");
  quot_in.attach(c_quot);
  c_quot->add_option("--map", quot_map, "letter=element assignments")
      ->required();
  c_quot->add_option("--accepting", quot_accepting, "accepting elements")
      ->required();
  c_quot->add_option("--out", quot_out);
  c_quot->callback([&] {
    Algebra a = quot_in.load();
    clo::Recognizer rec{parse_map(a, quot_map),
                        parse_elements(a, quot_accepting)};
    auto q = clo::syntactic_quotient(rec);
    report.set("algebra", q.quotient.label());
    report.set("size", q.quotient.size());
    nlohmann::ordered_json elems = nlohmann::ordered_json::array();
    for (const auto& name : q.quotient.names()) elems.push_back(name);
    report.set("elements", elems);
    if (!quot_out.empty()) clo::save_algebra_file(q.quotient, quot_out);
  });

  std::string div_left, div_right;
  auto* c_div = app.add_subcommand("divides",
                                   "does the left algebra divide the right?");
  c_div->add_option("--left", div_left)->required();
  c_div->add_option("--right", div_right)->required();
  c_div->callback([&] {
    Algebra a = load_spec(div_left, true);
    Algebra b = load_spec(div_right, true);
    auto result = clo::divides(a, b);
    switch (result.decision) {
      case clo::Decision::Yes: {
        report.set("divides", true);
        std::string sub;
        for (int x : result.witness->subalgebra) sub += b.name_of(x) + " ";
        report.set("witness_subalgebra", sub);
        break;
      }
      case clo::Decision::No:
        report.set("divides", false);
        exit_code = kNegative;
        break;
      case clo::Decision::Unknown:
        throw clo::Error("search budget exceeded; result is unknown");
    }
  });

  // builtin / sn ----------------------------------------------------------
  std::string builtin_name, builtin_out;
  auto* c_builtin = app.add_subcommand("builtin", "print a builtin algebra");
  c_builtin->add_option("--name", builtin_name)->required();
  c_builtin->add_option("--out", builtin_out);
  c_builtin->callback([&] {
    Algebra a = clo::builtin(builtin_name);
    if (!builtin_out.empty()) {
      clo::save_algebra_file(a, builtin_out);
      report.set("written", builtin_out);
    } else {
      std::cout << clo::save_algebra_text(a);
    }
  });

  std::string sn_alphabet, sn_out;
  int sn_n = 1;
  auto* c_sn = app.add_subcommand(
      "sn", "subword-class quotient over an alphabet");
  c_sn->add_option("--alphabet", sn_alphabet, "letters, e.g. ab")->required();
  c_sn->add_option("--n", sn_n)->required();
  c_sn->add_option("--out", sn_out);
  c_sn->callback([&] {
    std::vector<std::string> sigma;
    for (char c : sn_alphabet) sigma.push_back(std::string(1, c));
    auto sn = clo::build_sn(sigma, sn_n);
    report.set("algebra", sn.algebra.label());
    report.set("size", sn.algebra.size());
    nlohmann::ordered_json elems = nlohmann::ordered_json::array();
    for (const auto& name : sn.algebra.names()) elems.push_back(name);
    report.set("elements", elems);
    if (!sn_out.empty()) clo::save_algebra_file(sn.algebra, sn_out);
  });

  // eval / member / transduce ----------------------------------------------
  AlgebraInput eval_in;
  std::vector<std::string> eval_map;
  TermInput eval_term_in;
  auto* c_eval = app.add_subcommand("eval", "evaluate a term");
  eval_in.attach(c_eval);
  c_eval->add_option("--map", eval_map)->required();
  eval_term_in.attach(c_eval);
  c_eval->callback([&] {
    Algebra a = eval_in.load();
    clo::Morphism h = parse_map(a, eval_map);
    int v = clo::eval_term(eval_term_in.parse(), h);
    report.set("value", a.name_of(v));
  });

  AlgebraInput member_in;
  std::vector<std::string> member_map;
  std::string member_accepting;
  TermInput member_term_in;
  auto* c_member = app.add_subcommand("member", "membership in a recognizer");
  member_in.attach(c_member);
  c_member->add_option("--map", member_map)->required();
  c_member->add_option("--accepting", member_accepting)->required();
  member_term_in.attach(c_member);
  c_member->callback([&] {
    Algebra a = member_in.load();
    clo::Recognizer rec{parse_map(a, member_map),
                        parse_elements(a, member_accepting)};
    bool in = clo::member(member_term_in.parse(), rec);
    report.set("member", in);
    if (!in) exit_code = kNegative;
  });

  AlgebraInput trans_in;
  std::vector<std::string> trans_map;
  TermInput trans_term_in;
  auto* c_trans = app.add_subcommand(
      "transduce", "relabel positions with their context values");
  trans_in.attach(c_trans);
  c_trans->add_option("--map", trans_map)->required();
  trans_term_in.attach(c_trans);
  c_trans->callback([&] {
    Algebra a = trans_in.load();
    clo::Morphism h = parse_map(a, trans_map);
    clo::TermPtr t = clo::normalize_powers(trans_term_in.parse(), h);
    report.set("transduced", clo::format_term(clo::transduce(t, h)));
  });

  // rank / witness ----------------------------------------------------------
  std::string rank_letters, rank_letter, rank_direction;
  TermInput rank_term_in;
  auto* c_rank = app.add_subcommand("rank", "nesting rank of letter positions");
  rank_term_in.attach(c_rank);
  c_rank->add_option("--letters", rank_letters, "letter set, e.g. ab");
  c_rank->add_option("--letter", rank_letter, "single letter (directed rank)");
  c_rank->add_option("--direction", rank_direction)
      ->check(CLI::IsMember({"w", "w*"}));
  c_rank->callback([&] {
    clo::TermPtr t = rank_term_in.parse();
    if (!rank_direction.empty()) {
      if (rank_letter.empty())
        throw clo::Error("directed rank needs --letter");
      auto dir = rank_direction == "w" ? clo::Direction::Omega
                                       : clo::Direction::OmegaStar;
      report.set("rank", clo::directed_rank(t, rank_letter, dir).str());
    } else {
      std::set<std::string> letters;
      for (char c : rank_letters) letters.insert(std::string(1, c));
      if (!rank_letter.empty()) letters.insert(rank_letter);
      if (letters.empty()) throw clo::Error("give --letters or --letter");
      report.set("rank", clo::rank_of(t, letters).str());
    }
  });

  int witness_n = 1;
  TermInput witness_term_in;
  auto* c_witness = app.add_subcommand(
      "witness", "finite subword with the same bounded subwords");
  witness_term_in.attach(c_witness);
  c_witness->add_option("--n", witness_n)->required();
  c_witness->callback([&] {
    clo::Word w = clo::finite_witness(witness_term_in.parse(), witness_n);
    std::string out;
    for (const auto& letter : w) out += letter;
    report.set("witness", out.empty() ? "eps" : out);
  });

  // compile / mc -------------------------------------------------------------
  std::string compile_formula, compile_formula_file;
  std::string compile_strategy = "fo1", compile_alphabet;
  std::string compile_member, compile_word;
  auto* c_compile = app.add_subcommand("compile",
                                       "formula to recognizer compilation");
  auto* cf = c_compile->add_option("formula", compile_formula);
  c_compile->add_option("--formula-file", compile_formula_file,
                        "path to a .fml file")
      ->excludes(cf);
  c_compile->add_option("--strategy", compile_strategy)
      ->check(CLI::IsMember({"fo1", "fo1_inf", "bsigma1", "foinf"}));
  c_compile->add_option("--alphabet", compile_alphabet, "letters, e.g. ab");
  c_compile->add_option("--member", compile_member, "test a term");
  c_compile->add_option("--mc-word", compile_word, "test a finite word");
  c_compile->callback([&] {
    if (compile_formula.empty() && compile_formula_file.empty())
      throw clo::Error("give a formula or --formula-file");
    clo::FormulaPtr f = clo::parse_formula(
        compile_formula.empty() ? slurp(compile_formula_file)
                                : compile_formula);
    std::vector<std::string> sigma;
    for (char c : compile_alphabet) sigma.push_back(std::string(1, c));
    clo::Compiled compiled =
        clo::compile(f, clo::parse_strategy(compile_strategy), sigma);
    const Algebra& target = compiled.recognizer.h.target;
    report.set("target", target.label());
    report.set("size", target.size());
    std::string acc;
    for (int e : compiled.recognizer.accepting)
      acc += target.name_of(e) + " ";
    report.set("accepting", acc);
    if (!compile_member.empty()) {
      bool in = clo::member(clo::parse_term(compile_member),
                            compiled.recognizer);
      report.set("member", in ? "accept" : "reject");
      if (!in) exit_code = kNegative;
    }
    if (!compile_word.empty()) {
      bool in = clo::member(clo::term_from_word(parse_word(compile_word)),
                            compiled.recognizer);
      report.set("member", in ? "accept" : "reject");
      if (!in) exit_code = kNegative;
    }
  });

  std::string mc_formula, mc_formula_file, mc_word, mc_term;
  auto* c_mc = app.add_subcommand("mc", "model check a formula");
  auto* mf = c_mc->add_option("--formula", mc_formula);
  c_mc->add_option("--formula-file", mc_formula_file, "path to a .fml file")
      ->excludes(mf);
  c_mc->add_option("--word", mc_word, "finite word, brute-force semantics");
  c_mc->add_option("--term", mc_term, "term, one-variable rank semantics");
  c_mc->callback([&] {
    if (mc_formula.empty() && mc_formula_file.empty())
      throw clo::Error("give --formula or --formula-file");
    clo::FormulaPtr f = clo::parse_formula(
        mc_formula.empty() ? slurp(mc_formula_file) : mc_formula);
    bool value = false;
    if (mc_word.empty() == mc_term.empty())
      throw clo::Error("give exactly one of --word or --term");
    if (!mc_word.empty())
      value = clo::mc_finite(parse_word(mc_word), f);
    else
      value = clo::mc_term_onevar(clo::parse_term(mc_term), f);
    report.set("holds", value);
    if (!value) exit_code = kNegative;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? kFailure : kOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  report.print(format);
  return exit_code;
}
