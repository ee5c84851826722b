#include "hypsel/formula.hpp"
#include "hypsel/pomodel.hpp"
#include "hypsel/provers.hpp"
#include "hypsel/replay.hpp"
#include "hypsel/script.hpp"
#include "hypsel/session.hpp"
#include "hypsel/views.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace hypsel;

namespace {

std::vector<std::pair<bool, std::string>> run_text(Workbench &wb, const std::string &text)
{
    std::vector<std::pair<bool, std::string>> out;
    for (const auto &cmd : parse_script(text).commands) {
        Outcome o = wb.execute(cmd);
        out.emplace_back(o.ok, o.message);
        if (!o.ok)
            break;
    }
    return out;
}

Lemma make_lemma(const std::vector<std::string> &hyps, const std::string &goal)
{
    Lemma lemma;
    for (std::size_t i = 0; i < hyps.size(); ++i)
        lemma.hypotheses.push_back({"h" + std::to_string(i + 1), OriginTag::Local, parse_formula(hyps[i]), {}});
    lemma.goal = parse_formula(goal);
    return lemma;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Hypothesis selection for B proof obligations";

    py::register_exception<SyntaxError>(m, "FormulaSyntaxError", PyExc_ValueError);
    py::register_exception<PogError>(m, "PogError", PyExc_ValueError);
    py::register_exception<ScriptError>(m, "ScriptError", PyExc_ValueError);
    py::register_exception<SelectorError>(m, "SelectorError", PyExc_LookupError);

    m.def("normalize_formula", [](const std::string &text) { return print_formula(parse_formula(text)); },
          py::arg("text"), "Parse and print in canonical form.");
    m.def("free_identifiers", [](const std::string &text) { return free_identifiers(parse_formula(text)); },
          py::arg("text"));
    m.def("normalize_script", [](const std::string &text) { return format_script(parse_script(text)); },
          py::arg("text"));

    py::class_<Hypothesis>(m, "Hypothesis")
        .def_readonly("id", &Hypothesis::id)
        .def_property_readonly("origin", [](const Hypothesis &h) { return std::string(to_string(h.origin)); })
        .def_property_readonly("text", [](const Hypothesis &h) { return print_formula(h.formula); })
        .def_readonly("typing", &Hypothesis::typing)
        .def("__repr__", [](const Hypothesis &h) { return "<Hypothesis " + h.id + ">"; });

    py::class_<ProofObligation>(m, "ProofObligation")
        .def_readonly("name", &ProofObligation::name)
        .def_property_readonly("group", [](const ProofObligation &p) { return std::string(to_string(p.group)); })
        .def_property_readonly("goal", [](const ProofObligation &p) { return print_formula(p.goal); })
        .def_readonly("hypotheses", &ProofObligation::hypotheses)
        .def_readonly("planted", &ProofObligation::planted)
        .def("__repr__", [](const ProofObligation &p) { return "<ProofObligation " + p.name + ">"; });

    py::class_<PogFile, std::shared_ptr<PogFile>>(m, "PogFile")
        .def_readonly("component_name", &PogFile::component_name)
        .def_readonly("pos", &PogFile::pos)
        .def("to_xml", [](const PogFile &p) { return write_pog(p); })
        .def("save", [](const PogFile &p, const std::filesystem::path &path) { save_pog(p, path); });

    m.def("load_pog", [](const std::filesystem::path &p) { return std::make_shared<PogFile>(load_pog(p)); },
          py::arg("path"));
    m.def("parse_pog", [](const std::string &xml) { return std::make_shared<PogFile>(parse_pog(xml)); },
          py::arg("xml"));
    m.def(
        "generate_synthetic",
        [](std::size_t n_pos, std::size_t n_hyps, double relevant, std::uint64_t seed) {
            return std::make_shared<PogFile>(generate_synthetic({n_pos, n_hyps, relevant, seed}));
        },
        py::arg("n_pos"), py::arg("n_hyps"), py::arg("relevant_fraction") = 0.1, py::arg("seed") = 0);

    py::class_<Workbench>(m, "Workbench")
        .def(py::init([](std::shared_ptr<PogFile> pog, std::size_t start) {
                 if (start >= pog->pos.size())
                     throw py::index_error("no proof obligation at that index");
                 return Workbench(std::shared_ptr<const PogFile>(pog), start);
             }),
             py::arg("pog"), py::arg("start") = 0)
        .def("execute", &run_text, py::arg("text"),
             "Run commands; returns (ok, message) per command, stopping at the first failure.")
        .def("state_json", [](const Workbench &wb) { return state_view(wb).dump(); })
        .def("lemma_ids",
             [](const Workbench &wb) { return wb.session().ids_of(wb.session().state().selected); })
        .def("script", [](const Workbench &wb) { return format_script(wb.session().state().log); })
        .def(
            "prove",
            [](Workbench &wb, bool stop_on_valid) {
                std::string result;
                wb.set_prove_hook([&](const Lemma &lemma, const ProofObligation &) {
                    PortfolioResult r = run_portfolio(lemma, {builtin_config()}, {stop_on_valid});
                    result = to_json(r).dump();
                    return ProveReport{r.overall_valid, summarize(r)};
                });
                wb.prove();
                wb.set_prove_hook({});
                return result;
            },
            py::arg("stop_on_valid") = false)
        .def_property_readonly("cursor", &Workbench::cursor)
        .def_property_readonly("po_name", [](const Workbench &wb) { return wb.session().po().name; });

    m.def(
        "builtin_prove",
        [](const std::vector<std::string> &hyps, const std::string &goal, std::size_t budget) {
            ProverVerdict v = builtin_prove(make_lemma(hyps, goal), budget);
            return py::make_tuple(std::string(to_string(v.kind)), v.message);
        },
        py::arg("hypotheses"), py::arg("goal"), py::arg("budget") = 2'000'000);

    m.def(
        "replay_json",
        [](std::shared_ptr<PogFile> pog, const std::string &script, const std::string &selector, bool keep_going,
           bool prove) {
            ReplayOptions opts;
            opts.mode = keep_going ? ReplayMode::KeepGoing : ReplayMode::AbortOnError;
            opts.prove_at_end = prove;
            py::gil_scoped_release release;
            return to_json(replay(parse_script(script), *pog, selector, opts)).dump();
        },
        py::arg("pog"), py::arg("script"), py::arg("selector") = "all", py::arg("keep_going") = false,
        py::arg("prove") = false);
}
