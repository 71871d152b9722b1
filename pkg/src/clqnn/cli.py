"""Command-line front end.

Each subcommand resolves its configuration as defaults, then JSON config
file, then explicit flags (flags win), rejects unknown config keys by
name, and writes its outputs plus a manifest.json into the output
directory.  The manifest embeds the resolved config, the seed, and the
package version but no timestamps, so rerunning a command (or pointing
--config at a previous manifest, whose embedded config is then reused)
reproduces every output byte for byte.

Exit codes: 0 all checks passed, 1 a check failed, 2 usage or config
error, 3 unusable input data.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .circuits import TensorRotations, build_cl_qnn
from .experiments.ising import ising_experiment
from .experiments.toy import ToyScanConfig, rows_to_csv, toy_scan
from .experiments.wine import DataError, WineConfig, classification_experiment
from .io import csv_text, json_text, write_text
from .observables import PauliString
from .optim import TrainConfig, records_to_csv
from .rng import derive_rng, derive_seed
from .states import PureState
from .theory import (
    bloch_sample,
    lemma2_check,
    lemma3_check,
    mc_expected_f_sq,
    mc_expected_grad_norm_sq,
    random_density,
    random_hermitian,
    random_involution,
)

EXIT_PASS = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_DATA = 3


class ConfigError(Exception):
    """Bad config file or flag combination; maps to exit code 2."""


def _load_config_file(path):
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from None
    if isinstance(obj, dict) and "config" in obj and "command" in obj:
        obj = obj["config"]
    if not isinstance(obj, dict):
        raise ConfigError("config file must hold a JSON object")
    return obj


def _resolve_config(defaults, file_cfg, flag_cfg):
    cfg = dict(defaults)
    for key, value in (file_cfg or {}).items():
        if key not in defaults:
            raise ConfigError(f"unknown config key {key!r} "
                              f"(known: {', '.join(sorted(defaults))})")
        cfg[key] = value
    for key, value in flag_cfg.items():
        if value is not None:
            cfg[key] = value
    return cfg


def _parse_n_values(spec):
    """'3..6' -> (3,4,5,6); '3,5,9' -> (3,5,9); '7' -> (7,)."""
    spec = str(spec)
    try:
        if ".." in spec:
            lo, hi = spec.split("..")
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ValueError
            return tuple(range(lo, hi + 1))
        return tuple(int(tok) for tok in spec.split(","))
    except ValueError:
        raise ConfigError(f"cannot parse qubit range {spec!r}; "
                          f"use 'A..B', 'A,B,C', or a single integer") from None


def _parse_class_pair(spec):
    if isinstance(spec, (list, tuple)):
        pair = tuple(int(c) for c in spec)
    else:
        try:
            pair = tuple(int(tok) for tok in str(spec).split(","))
        except ValueError:
            raise ConfigError(f"cannot parse class pair {spec!r}") from None
    if len(pair) != 2:
        raise ConfigError(f"class pair needs exactly two labels, got {spec!r}")
    return pair


def _emit(out_dir, command, cfg, results, outputs):
    """Write output files and the manifest; returns the manifest path."""
    written = []
    for name, text in sorted(outputs.items()):
        write_text(os.path.join(out_dir, name), text)
        written.append(name)
    manifest = {
        "command": command,
        "version": __version__,
        "seed": cfg.get("seed"),
        "config": json.loads(json.dumps(cfg)),
        "results": json.loads(json_text(results)),
        "outputs": written,
    }
    path = os.path.join(out_dir, "manifest.json")
    write_text(path, json_text(manifest))
    return path


def _report_line(name, value, tol, ok):
    return f"{name}: max |lhs - rhs| = {value:.3e} (tol {tol:g}): {'pass' if ok else 'FAIL'}"


def cmd_verify_lemmas(cfg, out_dir):
    tol = float(cfg["tol"])
    worst2 = 0.0
    worst3 = 0.0
    for dim in (2, 4):
        for t in range(int(cfg["trials"])):
            rng = derive_rng(int(cfg["seed"]), dim, t)
            o = random_hermitian(dim, rng)
            g = random_involution(dim, rng)
            rho1 = random_density(dim, rng)
            rho2 = random_density(dim, rng)
            _, _, d2 = lemma2_check(o, g, rho1, rho2, nodes=int(cfg["nodes"]))
            _, _, d3 = lemma3_check(o, g, rho1, nodes=int(cfg["nodes"]))
            worst2 = max(worst2, d2)
            worst3 = max(worst3, d3)
    passed = worst2 < tol and worst3 < tol
    results = {"max_dev_product_identity": worst2, "max_dev_shift_identity": worst3,
               "tol": tol, "trials_per_dim": int(cfg["trials"]),
               "nodes": int(cfg["nodes"]), "passed": passed}
    print(_report_line("product identity", worst2, tol, worst2 < tol))
    print(_report_line("shift identity", worst3, tol, worst3 < tol))
    _emit(out_dir, "verify-lemmas", cfg, results, {})
    return EXIT_PASS if passed else EXIT_CHECK_FAILED


def cmd_verify_bounds(cfg, out_dir):
    n, l, s = int(cfg["n"]), int(cfg["l"]), int(cfg["s"])
    samples, seed, jobs = int(cfg["samples"]), int(cfg["seed"]), int(cfg["jobs"])
    circuit = build_cl_qnn(n, s, l, TensorRotations())
    sigma = PauliString([3] * s + [0] * (n - s))
    state = PureState.zero(n)
    rep_f = mc_expected_f_sq(circuit, sigma, state, samples,
                             derive_seed(seed, 0), jobs=jobs)
    rep_g = mc_expected_grad_norm_sq(circuit, sigma, state, samples,
                                     derive_seed(seed, 1), jobs=jobs)
    results = {"f_sq": rep_f.to_json_dict(), "grad_norm_sq": rep_g.to_json_dict()}
    for name, rep in (("E[f^2]", rep_f), ("E[|grad|^2]", rep_g)):
        print(f"{name}: estimate {rep.estimate:.6g} +- {rep.stderr:.2g} "
              f"vs bound {rep.bound:.6g}: {'pass' if rep.passed else 'FAIL'}")
    _emit(out_dir, "verify-bounds", cfg, results, {})
    passed = rep_f.passed and rep_g.passed
    return EXIT_PASS if passed else EXIT_CHECK_FAILED


def cmd_toy(cfg, out_dir):
    n_spec = cfg["n"]
    if cfg["full"] and n_spec == _TOY_DEFAULTS["n"]:
        n_spec = "3..20"
    ansatzes = tuple(tok for tok in str(cfg["ansatz"]).split(",") if tok)
    scan_cfg = ToyScanConfig(
        n_values=_parse_n_values(n_spec),
        ansatzes=ansatzes,
        rounds=int(cfg["rounds"]),
        noise_q=None if cfg["q"] is None else float(cfg["q"]),
        init=str(cfg["init"]),
        seed=int(cfg["seed"]),
        jobs=int(cfg["jobs"]),
        compute_grad=bool(cfg["grad"]),
    )
    rows = toy_scan(scan_cfg)
    results = {"rows": len(rows), "n_values": list(scan_cfg.n_values),
               "ansatzes": list(scan_cfg.ansatzes)}
    _emit(out_dir, "toy", cfg, results, {"scan.csv": rows_to_csv(rows)})
    print(f"wrote {len(rows)} scan rows to {os.path.join(out_dir, 'scan.csv')}")
    return EXIT_PASS


def cmd_ising(cfg, out_dir):
    n, l = int(cfg["n"]), int(cfg["l"])
    if cfg["full"]:
        if cfg["n"] == _ISING_DEFAULTS["n"]:
            n = 16
        if cfg["l"] == _ISING_DEFAULTS["l"]:
            l = 6
    optimizer = str(cfg["optimizer"])
    lr = cfg["lr"]
    if lr is None:
        lr = 0.01 if optimizer == "adam" else 0.15
    train_cfg = TrainConfig(iterations=int(cfg["iterations"]), optimizer=optimizer,
                            lr=float(lr), seed=int(cfg["seed"]),
                            shots_per_term=int(cfg["shots"]))
    result = ising_experiment(n, l, train_cfg, ansatz=str(cfg["ansatz"]))
    floor_ok = True
    if result.ground_state_energy is not None:
        floor = result.ground_state_energy - 1e-9
        floor_ok = all(v >= floor for v in result.exact_losses)
    results = {
        "ansatz": result.ansatz,
        "n": result.num_qubits,
        "l": result.num_blocks,
        "budget": {"n_1q": result.budget.n_1q, "n_cz": result.budget.n_cz,
                   "n_cnot": result.budget.n_cnot},
        "initial_loss": result.records[0].loss,
        "final_loss": result.records[-1].loss,
        "ground_state_energy": result.ground_state_energy,
        "exact_losses": list(result.exact_losses),
        "min_exact_loss": min(result.exact_losses),
        "variational_floor_respected": floor_ok,
    }
    _emit(out_dir, "ising", cfg, results,
          {"run.csv": records_to_csv(result.records)})
    print(f"loss {results['initial_loss']:.4f} -> {results['final_loss']:.4f} "
          f"(ground energy {results['ground_state_energy']})")
    return EXIT_PASS if floor_ok else EXIT_CHECK_FAILED


def cmd_wine(cfg, out_dir):
    wine_cfg = WineConfig(
        iterations=int(cfg["iterations"]),
        optimizer=str(cfg["optimizer"]),
        lr=float(cfg["lr"]),
        batch_size=int(cfg["batch_size"]),
        shots=int(cfg["shots"]),
        seed=int(cfg["seed"]),
        class_pair=_parse_class_pair(cfg["class_pair"]),
        data_path=cfg["data"],
    )
    result = classification_experiment(str(cfg["ansatz"]), wine_cfg)
    results = {
        "ansatz": result.ansatz,
        "budget": {"n_1q": result.budget.n_1q, "n_cz": result.budget.n_cz,
                   "n_cnot": result.budget.n_cnot},
        "train_size": result.train_size,
        "test_size": result.test_size,
        "final_train_loss": result.final_train_loss,
        "final_test_error": result.final_test_error,
    }
    _emit(out_dir, "wine", cfg, results,
          {"run.csv": records_to_csv(result.records)})
    print(f"final train loss {result.final_train_loss:.4f}, "
          f"final test error {result.final_test_error:.4f}")
    return EXIT_PASS


def cmd_bloch(cfg, out_dir):
    samples = int(cfg["samples"])
    vecs = bloch_sample(str(cfg["mode"]), samples, derive_rng(int(cfg["seed"])))
    var = vecs.var(axis=0)
    results = {"mode": str(cfg["mode"]), "samples": samples,
               "var_x": float(var[0]), "var_y": float(var[1]),
               "var_z": float(var[2]), "mean_z": float(vecs[:, 2].mean())}
    csv = csv_text(("x", "y", "z"), vecs.tolist())
    _emit(out_dir, "bloch", cfg, results, {"samples.csv": csv})
    print(f"z-variance {results['var_z']:.4f} over {samples} samples")
    return EXIT_PASS


_LEMMAS_DEFAULTS = {"trials": 100, "nodes": 64, "tol": 1e-10, "seed": 0}
_BOUNDS_DEFAULTS = {"n": 4, "l": 2, "s": 1, "samples": 2000, "seed": 0, "jobs": 1}
_TOY_DEFAULTS = {"n": "3..14", "ansatz": "cl,he,random", "rounds": 5, "q": None,
                 "init": "uniform", "seed": 0, "jobs": 1, "grad": True,
                 "full": False}
_ISING_DEFAULTS = {"n": 10, "l": 4, "ansatz": "cl", "optimizer": "adam", "lr": None,
                   "shots": 100, "iterations": 200, "seed": 0, "full": False}
_WINE_DEFAULTS = {"ansatz": "cl", "optimizer": "adam", "lr": 0.01, "batch_size": 8,
                  "shots": 100, "iterations": 200, "class_pair": "1,2",
                  "data": None, "seed": 0}
_BLOCH_DEFAULTS = {"mode": "uniform", "samples": 100000, "seed": 0}

_COMMANDS = {
    "verify-lemmas": (_LEMMAS_DEFAULTS, cmd_verify_lemmas),
    "verify-bounds": (_BOUNDS_DEFAULTS, cmd_verify_bounds),
    "toy": (_TOY_DEFAULTS, cmd_toy),
    "ising": (_ISING_DEFAULTS, cmd_ising),
    "wine": (_WINE_DEFAULTS, cmd_wine),
    "bloch": (_BLOCH_DEFAULTS, cmd_bloch),
}


def _add_common(sub):
    sub.add_argument("--config", help="JSON config file or a previous manifest.json")
    sub.add_argument("--out", help="output directory (default runs/<command>)")
    sub.add_argument("--seed", type=int, help="master seed")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="clqnn",
        description="Controlled-layer QNN simulation lab: analytic identity checks, "
                    "trainability bound verification, and desk-scale experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("verify-lemmas", help="randomized check of the averaging identities")
    _add_common(p)
    p.add_argument("--trials", type=int, help="instances per matrix size")
    p.add_argument("--nodes", type=int, help="quadrature nodes (>= 8 is exact)")
    p.add_argument("--tol", type=float, help="pass threshold on |lhs - rhs|")

    p = subs.add_parser("verify-bounds", help="Monte Carlo check of the loss/gradient bounds")
    _add_common(p)
    p.add_argument("--n", type=int, help="qubit count")
    p.add_argument("--l", type=int, help="number of controlled-layer blocks")
    p.add_argument("--s", type=int, help="controlled-layer width")
    p.add_argument("--samples", type=int, help="Monte Carlo draws")
    p.add_argument("--jobs", type=int, help="worker processes")

    p = subs.add_parser("toy", help="loss/gradient scaling scan over qubit count")
    _add_common(p)
    p.add_argument("--n", help="qubit counts: 'A..B', 'A,B,C', or one integer")
    p.add_argument("--ansatz", help="comma list from cl,he,random")
    p.add_argument("--rounds", type=int, help="independent parameter draws per cell")
    p.add_argument("--q", type=float, help="depolarizing keep-probability (density backend)")
    p.add_argument("--init", choices=("uniform", "haar-local"), help="angle distribution")
    p.add_argument("--jobs", type=int, help="worker processes")
    p.add_argument("--no-grad", dest="grad", action="store_const", const=False,
                   help="skip gradient evaluation (squared loss only)")
    p.add_argument("--full", action="store_const", const=True, help="widen to N<=20")

    p = subs.add_parser("ising", help="variational Ising ground-state search")
    _add_common(p)
    p.add_argument("--n", type=int, help="qubit count")
    p.add_argument("--l", type=int, help="number of controlled-layer blocks")
    p.add_argument("--ansatz", choices=("cl", "random"), help="circuit family")
    p.add_argument("--optimizer", choices=("sgd", "adam"))
    p.add_argument("--lr", type=float, help="learning rate (default 0.01 adam / 0.15 sgd)")
    p.add_argument("--shots", type=int, help="measurements per Pauli term")
    p.add_argument("--iterations", type=int)
    p.add_argument("--full", action="store_const", const=True,
                   help="full scale N=16, L=6")

    p = subs.add_parser("wine", help="binary wine classification")
    _add_common(p)
    p.add_argument("--ansatz", choices=("cl", "he", "random"))
    p.add_argument("--optimizer", choices=("sgd", "adam"))
    p.add_argument("--lr", type=float)
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--shots", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--class-pair", dest="class_pair", help="two labels, e.g. '1,2'")
    p.add_argument("--data", help="wine data file (default: $WINE_DATA, then bundled)")

    p = subs.add_parser("bloch", help="sample single-qubit Bloch vectors")
    _add_common(p)
    p.add_argument("--mode", choices=("uniform", "haar-local", "haar", "uniform-angles"))
    p.add_argument("--samples", type=int)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    defaults, runner = _COMMANDS[args.command]
    try:
        file_cfg = _load_config_file(args.config) if args.config else None
        flag_cfg = {key: getattr(args, key) for key in defaults
                    if hasattr(args, key)}
        cfg = _resolve_config(defaults, file_cfg, flag_cfg)
        out_dir = args.out or os.path.join("runs", args.command)
        return runner(cfg, out_dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
