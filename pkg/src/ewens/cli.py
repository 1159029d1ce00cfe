"""Command-line front end.

Every subcommand writes exactly one JSON report to stdout (keys sorted, one
line) and puts bulk data in files, so reruns with the same flags and seed
are byte-identical.  Report fields: command, inputs (the echoed flags),
seed (null for deterministic commands), version, and either result or
error.  Exit codes: 0 success, 1 runtime or domain error, 2 usage error.

Seeds are accepted in decimal or 0x-prefixed hex and default to 0; no
command ever draws entropy from the clock.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import __version__
from ._validation import check_seed
from .classifier import fit_classifier, label_marginal, label_simultaneous, load_model, save_model
from .esf import esf_log_probability, esf_probability, resolve_psi
from .estimate import bootstrap_ci, mle_psi
from .hypotests import lrt_samples, score_test, watterson_test
from .io import read_csv_columns, read_csv_rows, read_tokens, write_tokens
from .partitions import compute_abundance
from .urn import sample_hoppe_urn

__all__ = ["main", "build_parser"]

DEFAULT_SEED = 0


class CliUsageError(Exception):
    """Flag combination that argparse alone cannot reject."""


def _seed_arg(text: str) -> int:
    t = text.strip().lower()
    try:
        value = int(t, 16) if t.startswith("0x") else int(t, 10)
        return check_seed(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from exc
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from exc
    if not (math.isfinite(value) and value > 0):
        raise argparse.ArgumentTypeError(f"expected a positive finite number, got {text}")
    return value


def _psi_spec(text: str):
    """'a' (absolute, 1), 'r' (relative, n), or an explicit positive value."""
    if text in ("a", "r"):
        return text
    return _positive_float(text)


def _require_tokens(path: str) -> list[str]:
    tokens = read_tokens(path)
    if not tokens:
        raise ValueError(f"{path}: no tokens found (empty file)")
    return tokens


def _test_result_doc(result) -> dict:
    doc = {
        "statistic_name": result.statistic_name,
        "statistic": result.statistic,
        "p_value": result.p_value,
        "extras": dict(result.extras),
    }
    if result.df is not None:
        doc["df"] = result.df
    return doc


def _emit(command: str, inputs: dict, seed, compute) -> int:
    doc = {"command": command, "inputs": inputs, "seed": seed, "version": __version__}
    try:
        doc["result"] = compute()
    except (ValueError, OSError) as exc:
        doc["error"] = str(exc)
    sys.stdout.write(json.dumps(doc, sort_keys=True) + "\n")
    return 0 if "error" not in doc else 1


def _cmd_sample(args) -> int:
    def compute():
        draw = sample_hoppe_urn(args.n, args.psi, seed=args.seed)
        write_tokens(args.out, draw.tolist())
        return {"n": args.n, "psi": args.psi, "k": int(draw.max()), "out": args.out}

    inputs = {"n": args.n, "psi": args.psi, "out": args.out}
    return _emit("sample", inputs, args.seed, compute)


def _cmd_prob(args) -> int:
    def compute():
        tokens = _require_tokens(args.data)
        abund = compute_abundance(tokens)
        psi = resolve_psi(args.psi, n=abund.n)
        logp = esf_log_probability(abund, psi)
        return {
            "n": abund.n,
            "k": abund.k,
            "psi": psi,
            "log_probability": logp,
            "probability": math.exp(logp),
        }

    return _emit("prob", {"data": args.data, "psi": args.psi}, None, compute)


def _parse_ci_values(values) -> tuple[float, int, float]:
    if len(values) > 3:
        raise CliUsageError("--ci takes at most three values: level rounds frac")
    level, rounds, frac = 0.95, 1000, 0.8
    try:
        if len(values) >= 1:
            level = float(values[0])
        if len(values) >= 2:
            rounds = int(values[1])
        if len(values) >= 3:
            frac = float(values[2])
    except ValueError as exc:
        raise CliUsageError(f"bad --ci values {values!r}: {exc}") from exc
    return level, rounds, frac


def _cmd_mle(args) -> int:
    ci_spec = None if args.ci is None else _parse_ci_values(args.ci)

    def compute():
        tokens = _require_tokens(args.data)
        est = mle_psi(compute_abundance(tokens))
        result = {
            "psi_hat": est.psi_hat,
            "n": est.n,
            "k": est.k,
            "iterations": est.iterations,
        }
        if ci_spec is not None:
            level, rounds, frac = ci_spec
            ci = bootstrap_ci(tokens, level=level, rounds=rounds, frac=frac, seed=args.seed)
            result["ci"] = {
                "lower": ci.lower,
                "upper": ci.upper,
                "level": ci.level,
                "rounds": ci.rounds,
                "frac": ci.frac,
            }
        return result

    inputs = {"data": args.data, "ci": args.ci}
    seed = args.seed if ci_spec is not None else None
    return _emit("mle", inputs, seed, compute)


def _cmd_test_psi(args) -> int:
    def compute():
        tokens = _require_tokens(args.data)
        return _test_result_doc(score_test(compute_abundance(tokens), psi0=args.psi))

    return _emit("test psi", {"data": args.data, "psi": args.psi}, None, compute)


def _cmd_test_two(args) -> int:
    def compute():
        abunds = [compute_abundance(_require_tokens(p)) for p in (args.first, args.second)]
        return _test_result_doc(lrt_samples(abunds))

    return _emit("test two", {"first": args.first, "second": args.second}, None, compute)


def _cmd_test_mult(args) -> int:
    if args.csv is not None and args.files:
        raise CliUsageError("give sample files or --csv, not both")
    if args.csv is None and len(args.files) < 2:
        raise CliUsageError("need at least two sample files (or --csv)")

    def compute():
        if args.csv is not None:
            columns = read_csv_columns(args.csv, skip_header=args.skip_header)
            if len(columns) < 2:
                raise ValueError(f"{args.csv}: need at least two columns, got {len(columns)}")
            samples = columns
        else:
            samples = [_require_tokens(p) for p in args.files]
        return _test_result_doc(lrt_samples([compute_abundance(s) for s in samples]))

    inputs = {"files": args.files, "csv": args.csv, "skip_header": args.skip_header}
    return _emit("test mult", inputs, None, compute)


def _cmd_test_pd(args) -> int:
    def compute():
        tokens = _require_tokens(args.data)
        return _test_result_doc(watterson_test(tokens, rounds=args.rounds, seed=args.seed))

    inputs = {"data": args.data, "rounds": args.rounds}
    return _emit("test pd", inputs, args.seed, compute)


def _cmd_classify_fit(args) -> int:
    def compute():
        rows = read_csv_rows(args.train, skip_header=args.skip_header)
        if not rows:
            raise ValueError(f"{args.train}: no data rows")
        labels = _require_tokens(args.labels)
        model = fit_classifier(rows, labels)
        save_model(model, args.out)
        counts = {str(c): labels.count(c) for c in model.classes}
        return {
            "model": args.out,
            "classes": list(model.classes),
            "n_features": model.n_features,
            "n_rows": len(rows),
            "class_counts": counts,
        }

    inputs = {
        "train": args.train,
        "labels": args.labels,
        "out": args.out,
        "skip_header": args.skip_header,
    }
    return _emit("classify fit", inputs, None, compute)


def _label_counts(model, labels) -> dict:
    return {str(c): sum(1 for lab in labels if lab == c) for c in model.classes}


def _cmd_classify_marginal(args) -> int:
    def compute():
        model = load_model(args.model)
        rows = read_csv_rows(args.test, skip_header=args.skip_header)
        labels = label_marginal(model, rows)
        write_tokens(args.out, labels)
        return {
            "labels": args.out,
            "n_rows": len(rows),
            "class_counts": _label_counts(model, labels),
        }

    inputs = {
        "model": args.model,
        "test": args.test,
        "out": args.out,
        "skip_header": args.skip_header,
    }
    return _emit("classify marginal", inputs, None, compute)


def _cmd_classify_simultaneous(args) -> int:
    def compute():
        model = load_model(args.model)
        rows = read_csv_rows(args.test, skip_header=args.skip_header)
        labeling = label_simultaneous(model, rows, max_sweeps=args.max_sweeps)
        write_tokens(args.out, labeling.labels)
        return {
            "labels": args.out,
            "n_rows": len(rows),
            "class_counts": _label_counts(model, labeling.labels),
            "sweeps": labeling.sweeps,
            "converged": labeling.converged,
        }

    inputs = {
        "model": args.model,
        "test": args.test,
        "out": args.out,
        "max_sweeps": args.max_sweeps,
        "skip_header": args.skip_header,
    }
    return _emit("classify simultaneous", inputs, None, compute)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ewens",
        description="Inference under partition exchangeability: Ewens sampling "
        "formula probabilities, Poisson-Dirichlet sampling, dispersal estimation, "
        "hypothesis tests, and predictive classification.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw one sample from the Hoppe urn")
    p.add_argument("--n", type=_positive_int, required=True, help="sample size")
    p.add_argument("--psi", type=_positive_float, required=True, help="dispersal parameter")
    p.add_argument("--seed", type=_seed_arg, default=DEFAULT_SEED)
    p.add_argument("--out", required=True, help="output file, one token per line")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("prob", help="Ewens sampling formula probability of a sample")
    p.add_argument("data", help="token file, one per line")
    p.add_argument("--psi", type=_psi_spec, default="a", help='"a", "r", or a number')
    p.set_defaults(func=_cmd_prob)

    p = sub.add_parser("mle", help="maximum-likelihood dispersal estimate")
    p.add_argument("data")
    p.add_argument(
        "--ci",
        nargs="*",
        metavar="V",
        help="bootstrap CI; optional values: level rounds frac (default 0.95 1000 0.8)",
    )
    p.add_argument("--seed", type=_seed_arg, default=DEFAULT_SEED)
    p.set_defaults(func=_cmd_mle)

    p = sub.add_parser("test", help="hypothesis tests")
    tsub = p.add_subparsers(dest="test_command", required=True)

    t = tsub.add_parser("psi", help="score test of a fixed dispersal value")
    t.add_argument("data")
    t.add_argument("--psi", type=_psi_spec, default="a")
    t.set_defaults(func=_cmd_test_psi)

    t = tsub.add_parser("two", help="likelihood-ratio test that two samples share psi")
    t.add_argument("first")
    t.add_argument("second")
    t.set_defaults(func=_cmd_test_two)

    t = tsub.add_parser("mult", help="likelihood-ratio test across several samples")
    t.add_argument("files", nargs="*", help="token files, one sample each")
    t.add_argument("--csv", help="alternative: one sample per CSV column, blanks skipped")
    t.add_argument("--skip-header", action="store_true")
    t.set_defaults(func=_cmd_test_mult)

    t = tsub.add_parser("pd", help="empirical shape test against the fitted model")
    t.add_argument("data")
    t.add_argument("--rounds", type=_positive_int, default=100)
    t.add_argument("--seed", type=_seed_arg, default=DEFAULT_SEED)
    t.set_defaults(func=_cmd_test_pd)

    p = sub.add_parser("classify", help="fit or apply the predictive classifier")
    csub = p.add_subparsers(dest="classify_command", required=True)

    c = csub.add_parser("fit", help="fit a model from a training CSV and a label file")
    c.add_argument("train", help="CSV of token rows")
    c.add_argument("labels", help="one label per line, aligned with the CSV rows")
    c.add_argument("--out", required=True, help="where to write the model JSON")
    c.add_argument("--skip-header", action="store_true")
    c.set_defaults(func=_cmd_classify_fit)

    c = csub.add_parser("marginal", help="label test rows independently")
    c.add_argument("model")
    c.add_argument("test", help="CSV of token rows")
    c.add_argument("--out", required=True, help="where to write predicted labels")
    c.add_argument("--skip-header", action="store_true")
    c.set_defaults(func=_cmd_classify_marginal)

    c = csub.add_parser("simultaneous", help="label test rows jointly")
    c.add_argument("model")
    c.add_argument("test")
    c.add_argument("--out", required=True)
    c.add_argument("--max-sweeps", type=_positive_int, default=100)
    c.add_argument("--skip-header", action="store_true")
    c.set_defaults(func=_cmd_classify_simultaneous)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliUsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
