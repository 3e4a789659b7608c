"""Command-line front end.

    eigenrac generate --N 8 --method gm --x simplest --k 0 --m 1 --out g.json
    eigenrac table 6
    eigenrac simulate link.json --frames 1000 --sigma 0 --seed 1 --out metrics.csv
    eigenrac detect --pool pool.json --component comp.json

Exit status: 0 on success, 1 when a verification fails, 2 on usage errors.
Each run writes a manifest (parameters, seed, version, output digests) next to
``--out`` as ``<out>.manifest.json``, or to stderr when there is no ``--out``.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, eigen, formats, rac, txrx
from .sequence import RTOL, Eigenvalue, basis

EXIT_OK, EXIT_VERIFY, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class VerificationError(Exception):
    pass


def _num(v: complex | float, digits: int = 6) -> str:
    v = complex(v)
    if abs(v.imag) <= 1e-12 * max(1.0, abs(v)):
        return format(v.real + 0.0, f".{digits}g")
    return format(v, f".{digits}g")


def _input_sequence(spec: str, n: int, rng: np.random.Generator) -> np.ndarray:
    """Resolve ``simplest``, ``delta:M``, ``random``, ``random-real`` or a file path."""
    if spec == "simplest":
        return eigen.simplest_seed(n).seq
    if spec.startswith("delta:"):
        try:
            return basis("delta", int(spec.split(":", 1)[1]), n)
        except ValueError as e:
            raise UsageError(f"{spec}: {e}")
    if spec == "random":
        return rng.standard_normal(n) + 1j * rng.standard_normal(n)
    if spec == "random-real":
        return rng.standard_normal(n).astype(complex)
    path = Path(spec)
    if not path.exists():
        raise UsageError(f"unknown sequence spec or missing file: {spec}")
    x = formats.load_sequence(path)
    if x.shape != (n,):
        raise UsageError(f"{spec}: length {x.shape[0]} != N={n}")
    return x


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _manifest(args, params: dict) -> None:
    outputs = {}
    if args.out and Path(args.out).exists():
        outputs[str(args.out)] = hashlib.sha256(Path(args.out).read_bytes()).hexdigest()
    doc = {
        "tool": "eigenrac",
        "version": __version__,
        "command": args.command,
        "parameters": params,
        "seed": args.seed,
        "outputs": outputs,
    }
    text = json.dumps(doc, indent=1, sort_keys=True) + "\n"
    if args.out:
        Path(str(args.out) + ".manifest.json").write_text(text)
    else:
        sys.stderr.write(text)


def _lambda_arg(text: str) -> Eigenvalue:
    try:
        return Eigenvalue.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


# -- generate ---------------------------------------------------------------


def cmd_generate(args) -> int:
    n = args.N
    if n < 1:
        raise UsageError("N must be positive")
    rng = np.random.default_rng(args.seed)
    method = args.method
    if method in ("prop1", "prop2", "family") and args.lam is None:
        raise UsageError(f"--lambda is required for {method}")
    if method in ("gm", "matrix") and args.k is None:
        raise UsageError(f"--k is required for {method}")
    if method == "gm" and args.m is None:
        raise UsageError("--m is required for gm")
    if args.m is not None and not 0 <= args.m < n:
        raise UsageError(f"--m {args.m} out of range for N={n}")

    x = _input_sequence(args.x, n, rng)
    prov = {"method": method, "x": args.x}
    records = []
    if method == "prop1":
        g = eigen.generate_prop1(x, args.lam)
        prov["lambda_param"] = args.lam.value
        records.append(formats.SequenceRecord.from_invariant(g, **prov))
    elif method in ("prop2", "family"):
        if args.y is None:
            raise UsageError(f"--y is required for {method}")
        y = _input_sequence(args.y, n, rng)
        try:
            gen = eigen.generate_prop2 if method == "prop2" else eigen.generate_family
            g = gen(x, y, args.lam)
        except ValueError as e:
            raise UsageError(str(e))
        prov.update(y=args.y, lambda_param=args.lam.value)
        records.append(formats.SequenceRecord.from_invariant(g, **prov))
    elif method == "gm":
        try:
            g = eigen.generating_function_gm(x, args.m, args.k)
        except ValueError as e:
            raise UsageError(str(e))
        prov.update(k=args.k, m=args.m)
        records.append(formats.SequenceRecord.from_invariant(g, **prov))
    else:
        try:
            G = eigen.mapping_matrix(x, args.k)
        except ValueError as e:
            raise UsageError(str(e))
        res = G.column_residuals()
        ok = bool(np.all(res <= RTOL))
        if args.y is not None:
            g = G.apply(_input_sequence(args.y, n, rng))
            records.append(formats.SequenceRecord.from_invariant(g, method="matrix-apply", y=args.y, k=args.k))
            ok = ok and (g.zero or g.residual <= RTOL)
        if args.format == "json":
            doc = formats.mapping_matrix_to_json(G)
            doc["lambda"] = G.lam.value
            doc["column_residuals"] = [float(r) for r in res]
            if records:
                doc["product"] = records[0].to_json()
            _emit(args, json.dumps(doc, indent=1) + "\n")
        else:
            cols = [
                formats.SequenceRecord(c, G.lam, not np.any(c), {"column": m})
                for m, c in enumerate(G.columns)
            ]
            _emit(args, formats.dumps_records(cols + records, "csv"))
        print(f"# G^({args.k}) maps V_{G.source_lambda} -> V_{G.lam}; max column residual {res.max():.3g}",
              file=sys.stderr)
        _manifest(args, {"N": n, "method": method, "x": args.x, "y": args.y, "k": args.k})
        return EXIT_OK if ok else EXIT_VERIFY

    ok = all(r.zero or r.residual <= RTOL for r in records)
    _emit(args, formats.dumps_records(records, args.format))
    for r in records:
        tag = "zero" if r.zero else f"residual {r.residual:.3g}"
        print(f"# lambda {r.lam}: {tag}", file=sys.stderr)
    _manifest(args, {"N": n, "method": method, "lambda": args.lam and args.lam.value,
                     "x": args.x, "y": args.y, "k": args.k, "m": args.m})
    return EXIT_OK if ok else EXIT_VERIFY


# -- table ------------------------------------------------------------------


def cmd_table(args) -> int:
    if args.N < 2:
        raise UsageError("table needs N >= 2")
    rows = eigen.table(args.N)
    ok = True
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["lambda", "method", "k", "m", "residual", "sequence"])
    records = []
    for row in rows:
        if row.seq is None:
            w.writerow([row.lam.value, "empty", "", "", "", ""])
            continue
        r = row.seq.residual
        ok = ok and r <= RTOL
        w.writerow([row.lam.value, row.method, "" if row.k is None else row.k, row.m,
                    format(r, ".2e"), " ".join(_num(v) for v in row.seq.seq)])
        records.append(formats.SequenceRecord.from_invariant(row.seq, method=row.method, k=row.k, m=row.m))
    sys.stdout.write(buf.getvalue())
    if args.out:
        formats.write_records(args.out, records, args.format)
    _manifest(args, {"N": args.N})
    return EXIT_OK if ok else EXIT_VERIFY


# -- simulate ---------------------------------------------------------------


def _link_signatures(cfg: formats.LinkConfig):
    if cfg.pool_file is None:
        sigs = []
        for lam in cfg.selection:
            row = eigen.representative(cfg.N, lam)
            if row.seq is None:
                raise UsageError(f"V_{lam} is trivial for N={cfg.N}")
            sigs.append(row.seq)
        return sigs, None
    pool = formats.load_pool(cfg.pool_file)
    if pool.N != cfg.N:
        raise UsageError(f"pool length {pool.N} != config N={cfg.N}")
    missing = [lam for lam in cfg.selection if not pool.indices(lam)]
    if missing:
        raise UsageError(f"pool has no signatures for {','.join(map(str, missing))}")
    # worst case per group is its largest-energy signature
    sigs = [max((pool[i] for i in pool.indices(lam)), key=lambda s: np.linalg.norm(s.seq))
            for lam in cfg.selection]
    return sigs, pool


def simulate(cfg: formats.LinkConfig, frames: int, sigma: float, seed: int) -> list[tuple]:
    """Run the link and return metric rows ``(scope, lambda, metric, value)``."""
    sigs, pool = _link_signatures(cfg)
    M = txrx.dynamic_range(cfg.E_max, [s.seq for s in sigs])
    fc = txrx.FrameConfig(cfg.b, M, cfg.E_max, cfg.N)
    users = len(cfg.selection)
    rng = np.random.default_rng(seed)
    words = rng.integers(0, fc.levels, size=(frames, users))
    a = txrx.da_convert(words, fc).reshape(frames, users)

    if pool is None:
        y = txrx.transmit(words, sigs, fc).reshape(frames, cfg.N)
        active = None
    else:
        groups = [pool.indices(lam) for lam in cfg.selection]
        active = np.stack([rng.choice(g, size=frames) for g in groups], axis=1)
        sig_mat = np.stack([e.seq for e in pool.entries])
        y = np.einsum("fu,fun->fn", a, sig_mat[active])
        y = y.real if not np.any(y.imag) else y
    energy = np.sum(np.abs(y) ** 2, axis=1)
    rx = np.stack([txrx.add_noise(y[f], sigma, (seed, f)) for f in range(frames)])

    if pool is None:
        a_hat = txrx.receive_coefficients(rx, sigs, cfg.selection).reshape(frames, users)
        hits = None
    else:
        a_hat = np.zeros((frames, users))
        hits = np.zeros((frames, users), dtype=bool)
        for f in range(frames):
            est = txrx.detect_pooled(rx[f], pool, cfg.selection)
            a_hat[f] = [e.a_hat for e in est]
            hits[f] = [e.signature_index == active[f, u] for u, e in enumerate(est)]
    w_hat = np.asarray(txrx.ad_convert(a_hat, fc)).reshape(frames, users)
    if hits is not None:
        # a wrong signature makes the symbol wrong regardless of the coefficient
        w_hat = np.where(hits, w_hat, -1)

    rows = [
        ("link", "", "frames", frames),
        ("link", "", "sigma", sigma),
        ("link", "", "b", cfg.b),
        ("link", "", "M", M),
        ("link", "", "E_max", cfg.E_max),
        ("link", "", "energy_mean", float(energy.mean())),
        ("link", "", "energy_max", float(energy.max())),
        ("link", "", "random_guess_ser", 1 - 2.0 ** -cfg.b),
    ]
    for u, lam in enumerate(cfg.selection):
        errs = int(np.sum(w_hat[:, u] != words[:, u]))
        rows.append((f"user{u + 1}", lam.value, "symbol_errors", errs))
        rows.append((f"user{u + 1}", lam.value, "ser", errs / frames))
        rows.append((f"user{u + 1}", lam.value, "coef_rmse",
                     float(np.sqrt(np.mean((a_hat[:, u] - a[:, u]) ** 2)))))
        if hits is not None:
            rows.append((f"user{u + 1}", lam.value, "detection_accuracy", float(hits[:, u].mean())))
    return rows


def cmd_simulate(args) -> int:
    if args.frames < 1:
        raise UsageError("--frames must be at least 1")
    if args.sigma < 0:
        raise UsageError("--sigma must be non-negative")
    try:
        cfg = formats.load_config(args.config)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as e:
        raise UsageError(f"bad config: {e}")
    seed = 0 if args.seed is None else args.seed
    try:
        rows = simulate(cfg, args.frames, args.sigma, seed)
    except ValueError as e:
        raise UsageError(str(e))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["scope", "lambda", "metric", "value"])
    for scope, lam, metric, value in rows:
        value = format(value, ".17g") if isinstance(value, float) else value
        w.writerow([scope, lam, metric, value])
    _emit(args, buf.getvalue())
    _manifest(args, {"config": str(args.config), "frames": args.frames, "sigma": args.sigma})
    return EXIT_OK


# -- detect -----------------------------------------------------------------


def cmd_detect(args) -> int:
    try:
        pool = formats.load_pool(args.pool)
        comp = formats.load_sequence(args.component)
    except FileNotFoundError as e:
        raise UsageError(str(e))
    except ValueError as e:
        raise VerificationError(str(e))
    if comp.shape != (pool.N,):
        raise UsageError(f"component length {comp.shape[0]} != pool N={pool.N}")
    if args.group is not None:
        group = args.group
    elif len(pool.groups) == 1:
        group = pool.groups[0]
    else:
        group = eigen.classify(comp) if np.any(comp) else None
        if group is None:
            raise UsageError("pool spans several eigenspaces; pass --group")
    scores = txrx.signature_scores(comp, pool, group)
    best = txrx.estimate_signature(comp, pool, group)
    ranked = sorted(scores, key=lambda s: (s.variance, s.index))
    print(f"group {group}  ({len(scores)} candidates)")
    print(f"{'rank':>4} {'index':>5} {'variance':>14} {'mean':>14}")
    for r, s in enumerate(ranked):
        print(f"{r:>4} {s.index:>5} {s.variance:>14.6g} {_num(s.mean):>14}")
    print(f"winner: index {best.signature_index}  a_hat {best.a_hat:.6g}  variance {best.variance_score:.3g}")
    if args.out:
        doc = {
            "group": group.value,
            "signature_index": best.signature_index,
            "a_hat": best.a_hat,
            "variance_score": best.variance_score,
            "ranking": [{"index": s.index, "variance": s.variance, "mean": [s.mean.real, s.mean.imag]}
                        for s in ranked],
        }
        Path(args.out).write_text(json.dumps(doc, indent=1) + "\n")
    _manifest(args, {"pool": str(args.pool), "component": str(args.component),
                     "group": None if args.group is None else args.group.value})
    return EXIT_OK


# -- entry point ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="RNG seed (all randomness derives from it)")
    common.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    p = argparse.ArgumentParser(prog="eigenrac", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="build invariant sequences")
    g.add_argument("--N", type=int, required=True)
    g.add_argument("--method", choices=("prop1", "prop2", "family", "gm", "matrix"), required=True)
    g.add_argument("--lambda", dest="lam", type=_lambda_arg, default=None,
                   help="generator parameter for prop1/prop2/family; the output eigenvalue is its cube")
    g.add_argument("--x", default="simplest",
                   help="input or seed: simplest | delta:M | random | random-real | PATH")
    g.add_argument("--y", default=None, help="second input for prop2/family/matrix (same syntax)")
    g.add_argument("--k", type=int, choices=(0, 1, 2, 3), default=None)
    g.add_argument("--m", type=int, default=None)
    g.set_defaults(func=cmd_generate)

    t = sub.add_parser("table", parents=[common], help="one verified invariant sequence per eigenvalue")
    t.add_argument("N", type=int)
    t.set_defaults(func=cmd_table)

    s = sub.add_parser("simulate", parents=[common], help="run the digital link over random words")
    s.add_argument("config", type=Path)
    s.add_argument("--frames", type=int, default=1000)
    s.add_argument("--sigma", type=float, default=0.0)
    s.set_defaults(func=cmd_simulate)

    d = sub.add_parser("detect", parents=[common], help="blind signature estimation")
    d.add_argument("--pool", type=Path, required=True)
    d.add_argument("--component", type=Path, required=True)
    d.add_argument("--group", type=_lambda_arg, default=None)
    d.set_defaults(func=cmd_detect)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"eigenrac {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except VerificationError as e:
        print(f"eigenrac {args.command}: verification failed: {e}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
