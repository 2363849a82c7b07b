"""Command line entry point: ``hyperhom <group> <command> [options]``.

Exit codes: 0 on success, 1 on a domain error (the error class name is
printed on stderr), 2 on a usage error.  Output is deterministic: JSON is
written with sorted keys and every count is exact.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields
from pathlib import Path
from typing import Callable, Sequence

from . import bridge, decomp, homcount, labeled, quantum
from .config import Config, load_config
from .core_model import Hypergraph, IncidenceGraph
from .errors import CrossCheckFailed, HyperhomError, InputError
from .fixtures import fixture_names, fixture_path, render_fixture, write_fixtures
from .logic import (GCK, NGCK, Guard, check_syntax, evaluate, parse_formula, render_formula,
                    to_normal_form)


# ---------------------------------------------------------------------------
# Input helpers


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _read_json(path: str):
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _graph(path: str) -> IncidenceGraph:
    return IncidenceGraph.from_json(_read_json(path))


def _formula(path: str):
    return parse_formula(_read_text(path).strip())


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}")


# ---------------------------------------------------------------------------
# Output


class Output:
    def __init__(self, as_json: bool, stream=None):
        self.as_json = as_json
        self.stream = stream or sys.stdout

    def emit(self, data, text: str | None = None):
        if self.as_json or text is None:
            self.stream.write(json.dumps(data, sort_keys=True, indent=1) + "\n")
        else:
            self.stream.write(text.rstrip("\n") + "\n")


# ---------------------------------------------------------------------------
# Commands


def cmd_hom_count(args, config: Config, out: Output):
    if args.mode == "hypergraph":
        pattern = Hypergraph.from_json(_read_json(args.pattern))
        host = Hypergraph.from_json(_read_json(args.host))
        count = homcount.count_homs_hypergraph(pattern, host, config)
    elif args.mode == "labeled":
        pattern = labeled.LabeledGraph.from_json(_read_json(args.pattern))
        host = labeled.LabeledGraph.from_json(_read_json(args.host))
        count = homcount.count_homs_labeled(pattern, host, config)
    else:
        count = homcount.count_homs_incidence(_graph(args.pattern), _graph(args.host), config)
    out.emit({"count": str(count), "mode": args.mode}, str(count))


def cmd_decomp_validate(args, config: Config, out: Output):
    graph = _graph(args.graph)
    tree = decomp.TreeDecomp.from_json(_read_json(args.decomp))
    report = decomp.validate(tree, graph, args.mode)
    data = report.to_json()
    data["width"] = decomp.width(tree)
    text = "valid" if report.valid else "invalid\n" + "\n".join(report.violations)
    out.emit(data, f"{text}\nwidth {data['width']}")


def cmd_decomp_search(args, config: Config, out: Output):
    k = args.k if args.k is not None else config.default_k
    found = decomp.search_width(_graph(args.graph), k, args.mode, args.engine, config)
    if found is None:
        out.emit({"found": False}, f"no {args.mode} of width <= {k} found")
    else:
        out.emit(found.to_json())


def cmd_decomp_normalize(args, config: Config, out: Output):
    graph = _graph(args.graph)
    tree = decomp.TreeDecomp.from_json(_read_json(args.decomp))
    normal, root = decomp.normalize_binary_monotone(tree, graph)
    out.emit(normal.with_root(root).to_json())


def cmd_decomp_ghd2ehd(args, config: Config, out: Output):
    pattern = _graph(args.pattern)
    tree = decomp.TreeDecomp.from_json(_read_json(args.decomp))
    graph, result = decomp.ghd_to_ehd(pattern, tree, _graph(args.first), _graph(args.second),
                                      config)
    out.emit({"pattern": graph.to_json(), "decomposition": result.to_json()})


def _assignment(path: str | None) -> tuple[dict, dict]:
    if path is None:
        return {}, {}
    data = _read_json(path)
    try:
        red = {int(i): v for i, v in data.get("red", {}).items()}
        blue = {int(j): e for j, e in data.get("blue", {}).items()}
    except (AttributeError, ValueError):
        raise InputError("assignments are {\"red\": {i: node}, \"blue\": {j: node}}") from None
    return red, blue


def cmd_logic_eval(args, config: Config, out: Output):
    red, blue = _assignment(args.assign)
    verdict = evaluate(_graph(args.graph), _formula(args.formula), red, blue)
    out.emit({"holds": verdict}, "true" if verdict else "false")


def cmd_logic_nf(args, config: Config, out: Output):
    k = args.k if args.k is not None else config.default_k
    formula = _formula(args.formula)
    guard = Guard({int(i): j for i, j in _read_json(args.guard).items()}) if args.guard \
        else Guard({})
    body = to_normal_form(formula, guard, k, config.red_index_max)
    text = render_formula(body)
    out.emit({"formula": text, "guard": guard.to_json()}, text)


def cmd_logic_check(args, config: Config, out: Output):
    k = args.k if args.k is not None else config.default_k
    report = check_syntax(_formula(args.formula), k, args.mode, config.red_index_max)
    text = "ok" if report.valid else "violations:\n" + "\n".join(report.violations)
    out.emit(report.to_json(), text)


def _cert(path: str):
    return labeled.cert_from_json(_read_json(path))


def cmd_labeled_eval(args, config: Config, out: Output):
    out.emit(labeled.eval_cert(_cert(args.cert), args.k).to_json())


def cmd_labeled_cert2ehd(args, config: Config, out: Output):
    tree, root = labeled.cert_to_ehd(_cert(args.cert), args.k)
    out.emit(tree.with_root(root).to_json())


def cmd_labeled_ehd2cert(args, config: Config, out: Output):
    graph = _graph(args.graph)
    tree = decomp.TreeDecomp.from_json(_read_json(args.decomp))
    out.emit(labeled.cert_to_json(labeled.ehd_to_cert(graph, tree, args.k)))


def _quantum(path: str) -> quantum.QuantumGraph:
    return quantum.QuantumGraph.from_json(_read_json(path))


def cmd_quantum_hom(args, config: Config, out: Output):
    host = labeled.LabeledGraph.from_json(_read_json(args.host))
    value = quantum.qhom(_quantum(args.quantum), host)
    out.emit({"hom": str(value)}, str(value))


def cmd_quantum_indicator(args, config: Config, out: Output):
    result = quantum.normalize_indicator(_quantum(args.quantum), args.X, args.Y)
    out.emit(result.to_json())


def cmd_bridge_formula(args, config: Config, out: Output):
    cert = _cert(args.cert)
    body = bridge.formula_from_cert(cert, args.m, args.k)
    guard = labeled.eval_cert(cert).g
    text = render_formula(body)
    out.emit({"formula": text, "guard": guard.to_json()}, text)


def cmd_bridge_quantum(args, config: Config, out: Output):
    params = bridge.SizeParams(args.m, args.d)
    out.emit(bridge.quantum_from_formula(_formula(args.formula), args.k, params).to_json())


def _bounds(args) -> bridge.Bounds:
    return bridge.Bounds(args.max_blue, args.max_red)


def cmd_bridge_distinguish(args, config: Config, out: Output):
    found = bridge.distinguish_by_ehw(_graph(args.a), _graph(args.b), args.k, _bounds(args),
                                      config)
    if found is None:
        out.emit({"found": False, "seed": config.seed}, "no distinguisher within bounds")
        return
    data = found.to_json()
    data.update(found=True, seed=config.seed)
    out.emit(data, f"hom(J, a) = {found.count_first}\nhom(J, b) = {found.count_second}\n"
                   f"J = {json.dumps(found.pattern.to_json(), sort_keys=True)}")


def cmd_bridge_crosscheck(args, config: Config, out: Output):
    sentence = _formula(args.formula) if args.formula else None
    report = bridge.crosscheck_main_theorem(_graph(args.a), _graph(args.b), args.k,
                                            _bounds(args), sentence, config)
    data = report.to_json()
    data["seed"] = config.seed
    lines = [report.status]
    for direction in data["directions"]:
        for assertion in direction["assertions"]:
            mark = "pass" if assertion["passed"] else "FAIL"
            lines.append(f"{direction['direction']}: {mark} {assertion['name']}")
    out.emit(data, "\n".join(lines))
    if not report.passed:
        raise CrossCheckFailed(f"{report.status}: at least one assertion failed")


def cmd_fixtures_list(args, config: Config, out: Output):
    names = fixture_names()
    out.emit(names, "\n".join(names))


def cmd_fixtures_path(args, config: Config, out: Output):
    _known_fixture(args.name)
    path = str(fixture_path(args.name))
    out.emit({"path": path}, path)


def cmd_fixtures_show(args, config: Config, out: Output):
    _known_fixture(args.name)
    out.stream.write(fixture_path(args.name).read_text())


def cmd_fixtures_write(args, config: Config, out: Output):
    paths = [str(p) for p in write_fixtures(args.directory)]
    out.emit(paths, "\n".join(paths))


def cmd_fixtures_check(args, config: Config, out: Output):
    stale = [name for name in fixture_names()
             if not fixture_path(name).exists() or fixture_path(name).read_text()
             != render_fixture(name)]
    out.emit({"stale": stale}, "ok" if not stale else "stale:\n" + "\n".join(stale))
    if stale:
        raise InputError(f"{len(stale)} shipped fixture files differ from their sources")


def _known_fixture(name: str):
    if name not in fixture_names():
        raise InputError(f"unknown fixture {name!r}; see `fixtures list`")


# ---------------------------------------------------------------------------
# Parser


CAP_FIELDS = [f.name for f in fields(Config) if f.name not in ("default_k", "seed")]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value config file")
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="machine-readable JSON output")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="seed recorded in reports")
    for name in CAP_FIELDS:
        common.add_argument("--cap-" + name.replace("_", "-"), dest="cap_" + name, type=int,
                            default=argparse.SUPPRESS, help=f"override the {name} cap")

    parser = argparse.ArgumentParser(prog="hyperhom", parents=[common],
                                     description="Homomorphism counts, decompositions and "
                                                 "guarded counting logic on hypergraphs.")
    groups = parser.add_subparsers(dest="group", required=True)

    def command(container, name: str, handler: Callable, help_text: str):
        sub = container.add_parser(name, parents=[common], help=help_text)
        sub.set_defaults(handler=handler)
        return sub

    sub = command(groups, "hom-count", cmd_hom_count, "exact homomorphism count")
    sub.add_argument("--pattern", required=True)
    sub.add_argument("--host", required=True)
    sub.add_argument("--mode", choices=["incidence", "hypergraph", "labeled"],
                     default="incidence")

    group = groups.add_parser("decomp", help="tree decompositions").add_subparsers(
        dest="command", required=True)
    sub = command(group, "validate", cmd_decomp_validate, "check a decomposition")
    sub.add_argument("--graph", required=True)
    sub.add_argument("--decomp", required=True)
    sub.add_argument("--mode", choices=[decomp.GHD, decomp.EHD], default=decomp.GHD)
    sub = command(group, "search", cmd_decomp_search, "find a decomposition of width <= k")
    sub.add_argument("--graph", required=True)
    sub.add_argument("--k", type=int)
    sub.add_argument("--mode", choices=[decomp.GHD, decomp.EHD], default=decomp.GHD)
    sub.add_argument("--engine", choices=[decomp.EXACT, decomp.GREEDY], default=decomp.EXACT)
    sub = command(group, "normalize", cmd_decomp_normalize, "binary monotone normal form")
    sub.add_argument("--graph", required=True)
    sub.add_argument("--decomp", required=True)
    sub = command(group, "ghd2ehd", cmd_decomp_ghd2ehd, "pump a ghd into an ehd")
    sub.add_argument("--pattern", required=True)
    sub.add_argument("--decomp", required=True)
    sub.add_argument("--first", required=True)
    sub.add_argument("--second", required=True)

    group = groups.add_parser("logic", help="guarded counting logic").add_subparsers(
        dest="command", required=True)
    sub = command(group, "eval", cmd_logic_eval, "evaluate a formula on a graph")
    sub.add_argument("--graph", required=True)
    sub.add_argument("--formula", required=True)
    sub.add_argument("--assign")
    sub = command(group, "nf", cmd_logic_nf, "normal form under a guard")
    sub.add_argument("--formula", required=True)
    sub.add_argument("--guard", help="JSON object {i: j}")
    sub.add_argument("--k", type=int)
    sub = command(group, "check", cmd_logic_check, "syntax check")
    sub.add_argument("--formula", required=True)
    sub.add_argument("--mode", choices=[GCK, NGCK], default=GCK)
    sub.add_argument("--k", type=int)

    group = groups.add_parser("labeled", help="labeled graphs and certificates").add_subparsers(
        dest="command", required=True)
    sub = command(group, "eval-cert", cmd_labeled_eval, "evaluate a certificate")
    sub.add_argument("--cert", required=True)
    sub.add_argument("--k", type=int)
    sub = command(group, "cert2ehd", cmd_labeled_cert2ehd, "decomposition from a certificate")
    sub.add_argument("--cert", required=True)
    sub.add_argument("--k", type=int)
    sub = command(group, "ehd2cert", cmd_labeled_ehd2cert, "certificate from an ehd")
    sub.add_argument("--graph", required=True)
    sub.add_argument("--decomp", required=True)
    sub.add_argument("--k", type=int)

    group = groups.add_parser("quantum", help="quantum graphs").add_subparsers(
        dest="command", required=True)
    sub = command(group, "hom", cmd_quantum_hom, "exact count of a quantum graph")
    sub.add_argument("--quantum", required=True)
    sub.add_argument("--host", required=True)
    sub = command(group, "indicator", cmd_quantum_indicator, "indicator normalization")
    sub.add_argument("--quantum", required=True)
    sub.add_argument("--X", type=_int_list, required=True)
    sub.add_argument("--Y", type=_int_list, required=True)

    group = groups.add_parser("bridge", help="compilers between logic and counts").add_subparsers(
        dest="command", required=True)
    sub = command(group, "formula-from-cert", cmd_bridge_formula, "formula for hom = m")
    sub.add_argument("--cert", required=True)
    sub.add_argument("--m", type=int, required=True)
    sub.add_argument("--k", type=int)
    sub = command(group, "quantum-from-formula", cmd_bridge_quantum, "quantum graph of a formula")
    sub.add_argument("--formula", required=True)
    sub.add_argument("--k", type=int, required=True)
    sub.add_argument("--m", type=int, required=True)
    sub.add_argument("--d", type=int, required=True)
    for name, handler, help_text in (
            ("distinguish", cmd_bridge_distinguish, "least distinguishing pattern"),
            ("crosscheck", cmd_bridge_crosscheck, "check both compiler directions")):
        sub = command(group, name, handler, help_text)
        sub.add_argument("--a", required=True)
        sub.add_argument("--b", required=True)
        sub.add_argument("--k", type=int, required=True)
        sub.add_argument("--max-blue", type=int, default=3)
        sub.add_argument("--max-red", type=int, default=3)
        if name == "crosscheck":
            sub.add_argument("--formula", help="a sentence separating the pair")

    group = groups.add_parser("fixtures", help="shipped worked examples").add_subparsers(
        dest="command", required=True)
    command(group, "list", cmd_fixtures_list, "list fixture names")
    for name, handler, help_text in (("path", cmd_fixtures_path, "print the file path"),
                                     ("show", cmd_fixtures_show, "print the file")):
        command(group, name, handler, help_text).add_argument("name")
    command(group, "write", cmd_fixtures_write, "write all fixtures").add_argument("directory")
    command(group, "check", cmd_fixtures_check, "compare shipped files with their sources")
    return parser


def _config(args) -> Config:
    overrides = {name: getattr(args, "cap_" + name, None) for name in CAP_FIELDS}
    overrides["seed"] = getattr(args, "seed", None)
    return load_config(args.config, **overrides)


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = Output(getattr(args, "json", False), stdout)
    try:
        config = _config(args)
    except (OSError, ValueError) as exc:
        stderr.write(f"ConfigError: {exc}\n")
        return 2
    try:
        args.handler(args, config, out)
    except (HyperhomError, ValueError) as exc:
        stderr.write(f"{type(exc).__name__}: {exc}\n")
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
