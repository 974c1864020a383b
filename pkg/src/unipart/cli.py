"""Command line entry point.

Exit codes: 0 success, 1 verification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .circuit import CircuitSyntaxError, gate_count, load_circuit, measurement_circuit, random_prep_circuit, serialize_circuit
from .cover import HEURISTICS, ResourceLimitError, UnknownHeuristicError
from .graph import write_dimacs, build_relation_graph
from .hamiltonian import DEFAULT_PRUNE_THRESHOLD, InputError, load_hamiltonian, random_hamiltonian, serialize_hamiltonian
from .pipeline import format_stats_table, hamiltonian_stats, partition_document, partition_hamiltonian, scaling_csv, scaling_fit, verify_energy
from .simulator import MAX_QUBITS, SimulationError
from .unitary import ContractError

EXIT_OK, EXIT_VERIFY_FAILED, EXIT_INPUT = 0, 1, 2


class UsageError(Exception):
    pass


def _write(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dump_json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def cmd_partition(args) -> int:
    h = load_hamiltonian(args.input, args.prune_threshold)
    doc = partition_document(h, args.relation, args.heuristic, args.seed)
    _write(_dump_json(doc), args.output)
    if args.dimacs:
        write_dimacs(build_relation_graph(h, args.relation), args.dimacs)
    return EXIT_OK


def cmd_stats(args) -> int:
    if not args.input:
        raise UsageError("stats needs at least one --input file")
    reports, failed = [], False
    for path in args.input:
        try:
            h = load_hamiltonian(path, args.prune_threshold)
            reports.append(hamiltonian_stats(h, Path(path).stem, args.heuristics, args.seed))
        except (InputError, OSError) as exc:
            print(f"{path}: {exc}", file=sys.stderr)
            failed = True
    if reports:
        print(format_stats_table(reports, include_identity=args.include_identity_in_counts))
    if args.output:
        Path(args.output).write_text(_dump_json({"records": [r.to_dict() for r in reports]}), encoding="utf-8")
    return EXIT_INPUT if failed else EXIT_OK


def cmd_circuit(args) -> int:
    h = load_hamiltonian(args.input, args.prune_threshold)
    _, groups = partition_hamiltonian(h, "anticommute", args.heuristic, args.seed)
    if not 0 <= args.group_index < len(groups):
        raise UsageError(f"group index {args.group_index} out of range 0..{len(groups) - 1}")
    prep = load_circuit(args.prep) if args.prep else None
    circ = measurement_circuit(groups[args.group_index], prep)
    _write(serialize_circuit(circ), args.output)
    print(_dump_json(gate_count(circ)), end="", file=sys.stdout if args.output else sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    h = load_hamiltonian(args.input, args.prune_threshold)
    if h.n_qubits + 1 > MAX_QUBITS:
        raise UsageError(
            f"{h.n_qubits} system qubits plus ancilla exceed the simulator cap of {MAX_QUBITS}; "
            "statevector verification is not available at this size"
        )
    prep = load_circuit(args.prep) if args.prep else None
    res = verify_energy(h, prep, args.heuristic, args.mode, args.shots, args.seed, args.tolerance)
    print(f"E_direct      = {res.e_direct:.17g}")
    print(f"E_partitioned = {res.e_partitioned:.17g}")
    print(f"|difference|  = {res.difference:.3e}")
    if res.standard_error is not None:
        print(f"std_error     = {res.standard_error:.3e}")
    print(f"groups        = {res.n_groups}")
    print("PASS" if res.passed else "FAIL")
    return EXIT_OK if res.passed else EXIT_VERIFY_FAILED


def cmd_scaling_fit(args) -> int:
    ns, ts, ms = [], [], []
    for path in args.stats:
        for rec in json.loads(Path(path).read_text())["records"]:
            m = rec["m_anticommute_with_identity" if args.include_identity_in_counts else "m_anticommute"].get(args.heuristic)
            if m is None:
                continue
            ns.append(rec["n_qubits"])
            ts.append(rec["total_terms_with_identity" if args.include_identity_in_counts else "total_terms"])
            ms.append(m)
    try:
        fit = scaling_fit(ns, ts, ms)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(f"term slope  = {fit['term_slope']:.3f}")
    print(f"group slope = {fit['group_slope']:.3f}")
    if args.csv:
        Path(args.csv).write_text(scaling_csv(ns, ts, ms))
    if args.output:
        Path(args.output).write_text(_dump_json(fit))
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.kind == "hamiltonian":
        try:
            h = random_hamiltonian(args.qubits, args.terms, args.scale, args.seed)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        _write(serialize_hamiltonian(h), args.output)
    else:
        rng = np.random.default_rng(args.seed)
        _write(serialize_circuit(random_prep_circuit(args.qubits, args.gates, rng, args.entanglers)), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="unipart", description="Unitary partitioning of qubit Hamiltonians")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, heuristic=True):
        p.add_argument("--prune-threshold", type=float, default=DEFAULT_PRUNE_THRESHOLD)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--output", default=None)
        if heuristic:
            p.add_argument("--heuristic", choices=HEURISTICS + ("exact",), default="rlf")

    p = sub.add_parser("partition", help="group Hamiltonian terms and write JSON")
    p.add_argument("--input", required=True)
    p.add_argument("--relation", choices=["anticommute", "qwc"], default="anticommute")
    p.add_argument("--dimacs", default=None, help="also write the relation graph in DIMACS format")
    common(p)
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("stats", help="grouping statistics over several Hamiltonians")
    p.add_argument("--input", action="extend", nargs="+", default=[])
    p.add_argument("--heuristics", nargs="+", choices=HEURISTICS + ("exact",), default=list(HEURISTICS))
    p.add_argument("--include-identity-in-counts", action="store_true")
    common(p, heuristic=False)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("circuit", help="emit the measurement circuit of one group")
    p.add_argument("--input", required=True)
    p.add_argument("--group-index", type=int, default=0)
    p.add_argument("--prep", default=None, help="state preparation circuit file")
    common(p)
    p.set_defaults(func=cmd_circuit)

    p = sub.add_parser("verify", help="check partitioned energy against the direct expectation")
    p.add_argument("--input", required=True)
    p.add_argument("--prep", default=None)
    p.add_argument("--mode", choices=["exact", "sampled"], default="exact")
    p.add_argument("--shots", type=int, default=100_000)
    p.add_argument("--tolerance", type=float, default=1e-10)
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scaling-fit", help="log-log slopes from stats JSON files")
    p.add_argument("stats", nargs="+")
    p.add_argument("--heuristic", choices=HEURISTICS + ("exact",), default="rlf")
    p.add_argument("--include-identity-in-counts", action="store_true")
    p.add_argument("--csv", default=None)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_scaling_fit)

    p = sub.add_parser("gen", help="generate a random Hamiltonian or prep circuit")
    p.add_argument("--kind", choices=["hamiltonian", "prep"], default="hamiltonian")
    p.add_argument("--qubits", type=int, required=True)
    p.add_argument("--terms", type=int, default=10)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--gates", type=int, default=10)
    p.add_argument("--entanglers", type=int, default=0)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (
        InputError,
        CircuitSyntaxError,
        UsageError,
        UnknownHeuristicError,
        ContractError,
        ResourceLimitError,
        SimulationError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
