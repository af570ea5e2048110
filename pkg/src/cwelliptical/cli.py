"""Command-line interface.

Exit codes: 0 success / no rejection, 1 computation error, 2 invalid input
or configuration, 3 direction set is not an sm-uniqueness set, 4 the test
rejects.
"""

import argparse
import os
import sys

import numpy as np

from . import classify, harness, io, rpt, smset
from .errors import CWError, InvalidInput
from .rng import RngSeed

EXIT_OK, EXIT_COMPUTE, EXIT_INPUT, EXIT_NOT_UNIQUE, EXIT_REJECT = 0, 1, 2, 3, 4

#: uniqueness margins inside this band are reported as borderline
BORDERLINE = (1e-3, 1e3)


def _readable(path):
    if not os.path.isfile(path) or not os.access(path, os.R_OK):
        raise InvalidInput(f"cannot read {path}")
    return path


def _writable(path):
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent):
        raise InvalidInput(f"output directory {parent} does not exist")
    return path


def _directions_from(matrix):
    if np.all(matrix == np.round(matrix)) and np.max(np.abs(matrix)) < 2**31:
        matrix = matrix.astype(np.int64)
    try:
        return smset.DirectionSet(matrix)
    except InvalidInput as exc:
        raise InvalidInput(f"bad direction set: {exc}") from exc


def _write_text(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def cmd_gen_smset(args):
    if args.dim < 1:
        raise InvalidInput("--dim must be positive")
    if args.kind == "sum-basis":
        if not args.basis:
            raise InvalidInput("--kind sum-basis needs --basis")
        basis = io.read_csv_matrix(_readable(args.basis))
        if basis.shape != (args.dim, args.dim):
            raise InvalidInput(f"basis must be {args.dim} rows of {args.dim} values")
        s = smset.sum_basis_sm_set(basis)
    else:
        s = smset.canonical_sm_set(args.dim)
    if args.out not in (None, "-"):
        _writable(args.out)
        with open(args.out, "w", newline="") as fh:
            io.write_csv_matrix(fh, s.vectors)
    else:
        io.write_csv_matrix(sys.stdout, s.vectors)
    return EXIT_OK


def cmd_check_smset(args):
    s = _directions_from(io.read_csv_matrix(_readable(args.input)))
    unique = smset.is_sm_uniqueness_set(s)
    margin = smset.uniqueness_margin(s)
    report = {
        "dim": s.dim,
        "size": len(s),
        "required": smset.packed_size(s.dim),
        "sm_uniqueness_set": unique,
        "spans": smset.spans_space(s),
        "margin": margin,
        "borderline": bool(BORDERLINE[0] < margin < BORDERLINE[1]),
    }
    if not unique:
        report["witness"] = smset.null_witness(s).dense()
    sys.stdout.write(io.dumps(report))
    return EXIT_OK if unique else EXIT_NOT_UNIQUE


def cmd_rpt(args):
    x = io.read_csv_matrix(_readable(args.x))
    y = io.read_csv_matrix(_readable(args.y))
    dirs = _directions_from(io.read_csv_matrix(_readable(args.dirs))) if args.dirs else None
    if x.shape[1] != y.shape[1] or (dirs is not None and dirs.dim != x.shape[1]):
        raise InvalidInput("samples and directions must share one dimension")
    scheme = "pooled" if args.pooled else args.scheme
    cfg = rpt.RptConfig(dirs if dirs is not None else smset.canonical_sm_set(x.shape[1]),
                        args.B, args.alpha, RngSeed(args.seed), scheme)
    report = rpt.rpt_test(x, y, cfg, workers=args.threads)
    sys.stdout.write(io.dumps(report.to_json(cfg.to_json())))
    return EXIT_REJECT if report.reject else EXIT_OK


def _split_labeled(matrix):
    if matrix.shape[1] < 2:
        raise InvalidInput("training CSV needs feature columns plus a label column")
    labels = matrix[:, -1]
    if not np.all((labels == 0) | (labels == 1)):
        raise InvalidInput("label column must contain only 0 and 1")
    return classify.LabeledSample(matrix[:, :-1], labels.astype(np.int64))


def cmd_classify(args):
    if bool(args.train) == bool(args.model):
        raise InvalidInput("give exactly one of --train or --model")
    if args.model and not args.predict:
        raise InvalidInput("--model needs --predict")
    if args.model_out:
        _writable(args.model_out)
    if args.out not in (None, "-"):
        _writable(args.out)
    features = io.read_csv_matrix(_readable(args.predict)) if args.predict else None
    if args.train:
        train = _split_labeled(io.read_csv_matrix(_readable(args.train)))
        dirs = (_directions_from(io.read_csv_matrix(_readable(args.dirs))) if args.dirs
                else smset.canonical_sm_set(train.features.shape[1]))
        model = classify.fit(train, dirs, args.k, args.omega, args.delta, RngSeed(args.seed))
        if args.model_out or not args.predict:
            _write_text(args.model_out, io.dumps(model.to_json()))
    else:
        model = classify.RpClassifier.from_json(io.read_json(_readable(args.model)))
    if features is not None:
        labels = classify.predict_many(model, features)
        _write_text(args.out, "".join(f"{int(v)}\n" for v in labels))
    return EXIT_OK


def cmd_experiment(args):
    spec = harness.ScenarioSpec.from_json(io.read_json(_readable(args.config)))
    if os.path.exists(args.out) and not os.path.isdir(args.out):
        raise InvalidInput(f"{args.out} exists and is not a directory")
    _writable(args.out)
    os.makedirs(args.out, exist_ok=True)
    header, rows, summary = harness.run_experiment(spec, workers=args.threads)
    with open(os.path.join(args.out, "results.csv"), "w", newline="") as fh:
        io.write_csv_rows(fh, header, rows)
    manifest = {"config": spec.to_json(), "seed": spec.seed, "outputs": ["results.csv"],
                "summary": summary}
    with open(os.path.join(args.out, "manifest.json"), "w") as fh:
        fh.write(io.dumps(manifest))
    return EXIT_OK


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _seed(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=_positive_int, default=1,
                        help="worker cap; results do not depend on it")

    parser = argparse.ArgumentParser(prog="cwelliptical", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-smset", parents=[common], help="write a direction set")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--kind", choices=("canonical", "sum-basis"), default="canonical")
    p.add_argument("--basis", help="CSV with d linearly independent rows (sum-basis)")
    p.add_argument("--out", help="output CSV (default stdout)")
    p.set_defaults(func=cmd_gen_smset)

    p = sub.add_parser("check-smset", parents=[common], help="verify a direction set")
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(func=cmd_check_smset)

    p = sub.add_parser("rpt", parents=[common], help="random-projection two-sample test")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--dirs", help="direction CSV (default: canonical set)")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--B", type=int, default=500)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--scheme", choices=rpt.SCHEMES, default="separate")
    p.add_argument("--pooled", action="store_true", help="shorthand for --scheme pooled")
    p.set_defaults(func=cmd_rpt)

    p = sub.add_parser("classify", parents=[common], help="fit and/or apply the projection classifier")
    p.add_argument("--train", help="CSV of features plus a final 0/1 label column")
    p.add_argument("--model", help="model JSON from a previous fit")
    p.add_argument("--model-out", help="where to write the fitted model (default stdout)")
    p.add_argument("--predict", help="feature CSV to label")
    p.add_argument("--out", help="label output, one per line (default stdout)")
    p.add_argument("--dirs", help="direction CSV (default: canonical set)")
    p.add_argument("--k", type=_positive_int, help="neighbours (default: cross-validated)")
    p.add_argument("--omega", type=float, default=0.25)
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--seed", type=_seed, default=0)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("experiment", parents=[common], help="run a Monte Carlo study")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvalidInput as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"InvalidInput: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CWError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
