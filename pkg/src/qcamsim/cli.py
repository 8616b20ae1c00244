"""Command-line experiment runner.

Subcommands: heqc-sweep, qcam, jaccard, export-circuit, selftest.

Settings can also come from a flat ``key = value`` file given with
``--config``; keys mirror the long flag names (``dna-len`` or ``dna_len``).
Flags override the file. Exit codes: 0 success, 1 configuration or I/O
error, 2 capacity error, 3 verification mismatch.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import statistics
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import statevec
from .circuits import (Circuit, Sequence, build_diffuser, build_grover_iterator,
                       build_grover_oracle, build_matching_oracle, build_qbart,
                       build_qcam_circuit)
from .dna import (JaccardConfig, generate_dna, jaccard_qcam, jaccard_report_classical, mutate,
                  read_fasta)
from .heqc import build_heqc_hadamard, build_heqc_squared, exact_overlap, heqc_pipeline
from .qcam import (brute_force_matches, collect_matches, default_shot_budget, pad_sequences,
                   plant_matches, run_qcam, search_matches)
from .statevec import CapacityError

log = logging.getLogger("qcamsim")

EXIT_OK, EXIT_CONFIG, EXIT_CAPACITY, EXIT_MISMATCH = 0, 1, 2, 3

# "oracle" is the matching oracle; "grover-oracle" wraps it in data loading
CIRCUITS = ("qbart", "oracle", "grover-oracle", "diffuser", "grover", "qcam", "heqc-squared",
            "heqc-hadamard")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    seed: int = 0
    shots: int | None = None
    heqc_shots: int = 2000
    repeats: int = 21
    variant: str | None = None
    k: int = 2
    dna_len: int = 16
    mutation_rate: float = 0.1
    planted_m: int | None = None
    n_a: int | None = None
    n_b: int | None = None
    depth: int | None = None
    iterations: int | None = None
    max_qubits: int = statevec.MAX_QUBITS
    large: bool = False
    classical_only: bool = False
    circuit: str = "qcam"
    input: str | None = None
    fasta: str | None = None
    out: str | None = None

    def validate(self) -> "ExperimentConfig":
        if self.shots is not None and self.shots < 1:
            raise ConfigError("shots must be >= 1")
        if self.heqc_shots < 1:
            raise ConfigError("heqc-shots must be >= 1")
        if self.repeats < 1:
            raise ConfigError("repeats must be >= 1")
        if self.variant is not None and self.variant not in ("squared", "hadamard", "exact"):
            raise ConfigError(f"unknown variant {self.variant!r}")
        if self.k < 1 or self.dna_len < 1:
            raise ConfigError("k and dna-len must be >= 1")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ConfigError("mutation-rate must lie in [0, 1]")
        if self.circuit not in CIRCUITS:
            raise ConfigError(f"unknown circuit {self.circuit!r}; choose from {CIRCUITS}")
        return self


_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _coerce(key: str, value: str):
    typ = str(_TYPES[key])
    if value.lower() in ("none", ""):
        return None
    if "bool" in typ:
        if value.lower() in ("1", "true", "yes", "on"):
            return True
        if value.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{key}: not a boolean: {value!r}")
    try:
        if "int" in typ:
            return int(value)
        if "float" in typ:
            return float(value)
    except ValueError:
        raise ConfigError(f"{key}: bad value {value!r}") from None
    return value


def load_config_file(path) -> dict:
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in _TYPES:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _coerce(key, value)
    return out


def _add_common(p: argparse.ArgumentParser) -> None:
    S = argparse.SUPPRESS
    p.add_argument("--config", help="key=value settings file; flags override it")
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--shots", type=int, default=S)
    p.add_argument("--heqc-shots", type=int, default=S)
    p.add_argument("--repeats", type=int, default=S)
    p.add_argument("--variant", choices=("squared", "hadamard", "exact"), default=S)
    p.add_argument("--k", type=int, default=S, help="k-mer length")
    p.add_argument("--dna-len", type=int, default=S)
    p.add_argument("--mutation-rate", type=float, default=S)
    p.add_argument("--planted-m", type=int, default=S)
    p.add_argument("--n-a", type=int, default=S, help="address width of sequence a")
    p.add_argument("--n-b", type=int, default=S, help="address width of sequence b")
    p.add_argument("--depth", type=int, default=S, help="bit depth of sequence items")
    p.add_argument("--iterations", type=int, default=S, help="Grover iterations (overrides HEQC)")
    p.add_argument("--max-qubits", type=int, default=S)
    p.add_argument("--large", action="store_true", default=S)
    p.add_argument("--classical-only", action="store_true", default=S)
    p.add_argument("--input", default=S, help="integer sequence file: two lines, a then b")
    p.add_argument("--fasta", default=S, help="FASTA-like file with two strands")
    p.add_argument("--out", default=S, help="output path (default: stdout)")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcamsim", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("heqc-sweep", "HEQC phase reconstruction sweep over planted M"),
                        ("qcam", "QCAM matching of two integer sequences"),
                        ("jaccard", "k-mer Jaccard index of two DNA strands"),
                        ("export-circuit", "write a circuit as a JSON gate list"),
                        ("selftest", "quick end-to-end checks against classical oracles")):
        p = sub.add_parser(name, help=help_)
        _add_common(p)
        if name == "export-circuit":
            p.add_argument("--circuit", choices=CIRCUITS, default=argparse.SUPPRESS)
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(load_config_file(args.config))
    for key in _TYPES:
        if hasattr(args, key):
            values[key] = getattr(args, key)
    return ExperimentConfig(**values).validate()


def _check_qubits(total: int, cfg: ExperimentConfig) -> None:
    if total > cfg.max_qubits:
        raise CapacityError(f"{total} qubits needed, capacity is {cfg.max_qubits} "
                            f"({statevec.state_bytes(total)} bytes of amplitudes)")


def _write(text: str, cfg: ExperimentConfig, path: str | None = None) -> None:
    path = path or cfg.out
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _csv(rows, header) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def sweep_rows(cfg: ExperimentConfig):
    """Per-trial rows and per-M summary rows of the HEQC sweep."""
    n, d, m_max = (5, 8, 32) if cfg.large else (4, 4, 8)
    n_a = cfg.n_a if cfg.n_a is not None else n
    n_b = cfg.n_b if cfg.n_b is not None else n
    d = cfg.depth if cfg.depth is not None else d
    variant = cfg.variant or "squared"
    shots = cfg.shots or 2000
    n_total = 1 << (n_a + n_b)
    _check_qubits(n_a + n_b + 2 * d + 1 + (variant == "hadamard"), cfg)
    ms = [cfg.planted_m] if cfg.planted_m is not None else list(range(1, m_max + 1))

    rows, summary = [], []
    for m in ms:
        theta_true = 2 * math.asin(math.sqrt(m / n_total))
        thetas = []
        for trial in range(cfg.repeats):
            a, b = plant_matches(n_a, n_b, d, m, np.random.default_rng([cfg.seed, m, trial]))
            est = heqc_pipeline(a, b, shots=shots, seed=cfg.seed + trial, variant=variant,
                                max_qubits=cfg.max_qubits)
            thetas.append(est.theta)
            rows.append([m, trial, est.theta, theta_true, est.m_est, est.k])
        mean = statistics.fmean(thetas)
        std = statistics.stdev(thetas) if len(thetas) > 1 else 0.0
        summary.append([m, len(thetas), mean, std, std / math.sqrt(len(thetas)), theta_true])
        log.info("M=%d theta_hat=%.5f +- %.5f (true %.5f)", m, mean, std, theta_true)
    return rows, summary


SWEEP_HEADER = ["M_true", "trial", "theta_hat", "theta_true", "m_est", "k"]
SUMMARY_HEADER = ["M_true", "trials", "theta_mean", "theta_std", "theta_stderr", "theta_true"]


def cmd_heqc_sweep(cfg: ExperimentConfig) -> int:
    rows, summary = sweep_rows(cfg)
    main_csv, summary_csv = _csv(rows, SWEEP_HEADER), _csv(summary, SUMMARY_HEADER)
    if cfg.out:
        out = Path(cfg.out)
        out.write_text(main_csv)
        out.with_name(out.stem + ".summary" + (out.suffix or ".csv")).write_text(summary_csv)
    else:
        sys.stdout.write(main_csv + "\n" + summary_csv)
    return EXIT_OK


def read_int_sequences(path, depth: int | None = None) -> tuple[Sequence, Sequence]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    lines = [ln for ln in (l.split("#", 1)[0].strip() for l in text.splitlines()) if ln]
    if len(lines) != 2:
        raise ConfigError(f"{path}: expected two non-empty lines (sequence a, sequence b)")
    try:
        a, b = ([int(tok) for tok in ln.replace(",", " ").split()] for ln in lines)
    except ValueError:
        raise ConfigError(f"{path}: sequences must be whitespace/comma separated integers") from None
    if min(a + b) < 0:
        raise ConfigError("sequence values must be non-negative")
    d = depth if depth is not None else max(1, max(a + b).bit_length())
    return Sequence(tuple(a), d), Sequence(tuple(b), d)


def _sequences(cfg: ExperimentConfig) -> tuple[Sequence, Sequence]:
    if cfg.input:
        return read_int_sequences(cfg.input, cfg.depth)
    n_a = 2 if cfg.n_a is None else cfg.n_a
    n_b = 2 if cfg.n_b is None else cfg.n_b
    d = 3 if cfg.depth is None else cfg.depth
    m = 2 if cfg.planted_m is None else cfg.planted_m
    return plant_matches(n_a, n_b, d, m, np.random.default_rng(cfg.seed))


def cmd_qcam(cfg: ExperimentConfig) -> int:
    a, b = _sequences(cfg)
    pa, pb = pad_sequences(a, b)
    _check_qubits(pa.address_width + pb.address_width + 2 * pa.depth + 2, cfg)
    variant = cfg.variant or "hadamard"
    if cfg.iterations is not None:
        est = heqc_pipeline(pa, pb, shots=cfg.heqc_shots, seed=cfg.seed, variant=variant,
                            max_qubits=cfg.max_qubits)
        shots = cfg.shots or default_shot_budget(est.m_est)
        result = run_qcam(pa, pb, cfg.iterations, shots, cfg.seed + 1, cfg.max_qubits)
    else:
        result, est, pa, pb = search_matches(a, b, seed=cfg.seed, shots=cfg.shots,
                                             heqc_shots=cfg.heqc_shots, variant=variant,
                                             max_qubits=cfg.max_qubits)
    truth = brute_force_matches(pa, pb)
    found = collect_matches(result)
    report = result.to_dict()
    report.update(heqc=est.to_dict(), a=list(a.values), b=list(b.values), depth=a.depth,
                  padded_depth=pa.depth, brute_force_pairs=len(truth), found_pairs=len(found),
                  sound=found <= truth, complete=found == truth)
    _write(_json(report), cfg)
    return EXIT_OK if found <= truth else EXIT_MISMATCH


def _strands(cfg: ExperimentConfig):
    if cfg.fasta:
        try:
            strands = read_fasta(Path(cfg.fasta))
        except OSError as exc:
            raise ConfigError(f"cannot read {cfg.fasta}: {exc}") from None
        if len(strands) != 2:
            raise ConfigError(f"{cfg.fasta}: expected exactly two strands, got {len(strands)}")
        return strands
    a = generate_dna(cfg.dna_len, cfg.seed)
    return a, mutate(a, cfg.mutation_rate, cfg.seed + 1)


def cmd_jaccard(cfg: ExperimentConfig) -> int:
    a, b = _strands(cfg)
    classical = jaccard_report_classical(a, b, cfg.k)
    if cfg.classical_only:
        _write(_json(classical.to_dict()), cfg)
        return EXIT_OK
    n_a = (len(a) - cfg.k).bit_length()
    n_b = (len(b) - cfg.k).bit_length()
    _check_qubits(n_a + n_b + 4 * cfg.k + 1 + (cfg.variant in (None, "hadamard")), cfg)
    jc = JaccardConfig(shots=cfg.shots, heqc_shots=cfg.heqc_shots,
                       variant=cfg.variant or "hadamard", seed=cfg.seed,
                       max_qubits=cfg.max_qubits)
    quantum = jaccard_qcam(a, b, cfg.k, jc)
    equal = (quantum.matched_kmers == classical.matched_kmers
             and quantum.jaccard == classical.jaccard)
    report = {"quantum": quantum.to_dict(),
              "classical": {"size_a": classical.size_a, "size_b": classical.size_b,
                            "size_intersection": classical.size_intersection,
                            "jaccard": classical.jaccard},
              "equal": equal}
    _write(_json(report), cfg)
    return EXIT_OK if equal else EXIT_MISMATCH


def export_circuit(cfg: ExperimentConfig) -> Circuit:
    name = cfg.circuit
    if name == "diffuser":
        return build_diffuser(1 if cfg.n_a is None else cfg.n_a, 1 if cfg.n_b is None else cfg.n_b)
    if name == "oracle":
        return build_matching_oracle(cfg.depth or 2)
    a, b = pad_sequences(*_sequences(cfg))
    if name == "qbart":
        return build_qbart(a)
    if name == "grover-oracle":
        return build_grover_oracle(a, b)
    if name == "grover":
        return build_grover_iterator(a, b)
    if name == "qcam":
        k = cfg.iterations
        if k is None:
            k = heqc_pipeline(a, b, variant="exact", max_qubits=cfg.max_qubits).k
        return build_qcam_circuit(a, b, k)
    if name == "heqc-squared":
        return build_heqc_squared(a, b)
    return build_heqc_hadamard(a, b)


def cmd_export_circuit(cfg: ExperimentConfig) -> int:
    circuit = export_circuit(cfg)
    _check_qubits(circuit.num_qubits, cfg)
    _write(circuit.to_json() + "\n", cfg)
    return EXIT_OK


def cmd_selftest(cfg: ExperimentConfig) -> int:
    checks = []
    a, b = plant_matches(2, 2, 3, 4, np.random.default_rng(cfg.seed))
    checks.append(("oracle overlap (N-2M)/N", abs(exact_overlap(a, b) - 0.5) < 1e-10))
    est = heqc_pipeline(a, b, variant="exact")
    checks.append(("exact HEQC recovers M", abs(est.m_est - 4) < 1e-9))
    result, _, pa, pb = search_matches(a, b, seed=cfg.seed, variant="exact")
    checks.append(("QCAM finds all matches", collect_matches(result) == brute_force_matches(pa, pb)))
    s1 = generate_dna(16, cfg.seed)
    s2 = mutate(s1, 0.1, cfg.seed + 1)
    q = jaccard_qcam(s1, s2, 2, JaccardConfig(seed=cfg.seed))
    c = jaccard_report_classical(s1, s2, 2)
    checks.append(("quantum Jaccard equals classical", q.jaccard == c.jaccard))
    for name, ok in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    return EXIT_OK if all(ok for _, ok in checks) else EXIT_MISMATCH


COMMANDS = {
    "heqc-sweep": cmd_heqc_sweep,
    "qcam": cmd_qcam,
    "jaccard": cmd_jaccard,
    "export-circuit": cmd_export_circuit,
    "selftest": cmd_selftest,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
