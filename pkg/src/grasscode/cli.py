"""Command-line driver: ``python -m grasscode {generate,train,eval,bench}``.

Settings resolve as flags > ``--config`` JSON > built-in defaults.
Data goes to stdout or ``-o``; diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from .errors import GrasscodeError

DEFAULTS = {
    "generate": {
        "model": "ray", "mr": 1, "mv": 4, "mh": 4, "paths": 3, "spread": 10.0,
        "rho_v": 0.0, "rho_h": 0.0, "n": 1000, "seed": 0, "csv_dir": None, "output": None,
    },
    "train": {
        "data": None, "method": "bf-prod", "r": 1, "bv": 4, "bh": 4, "bits": 8,
        "split": None, "seed": 0, "max_iter": 200, "tol": 1e-6, "restarts": 1, "output": None,
    },
    "eval": {
        "data": None, "codebook": None, "method": "bf-prod", "r": 1,
        "rho_db": [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0], "split": None, "seed": 0,
        "select": "chordal", "output": None,
    },
    "bench": {
        "ns": [3, 4, 5, 6], "r": 2, "N": 2000, "K": 16, "K_prod": 16, "repeats": 20,
        "seed": 0, "output": None,
    },
}

BF_HEADER = ["Bv", "Bh", "Gamma_av", "Gamma_av_vs_full", "n_test", "seed"]
RATE_HEADER = [
    "method", "Mr", "Mv", "Mh", "r", "Bv", "Bh", "rho_t_dB", "R_av_quant", "R_av_unquant",
    "R_av_fullsvd", "cq_bits_diag", "n_test", "seed",
]
BENCH_HEADER = ["row", "n", "method", "median_s", "normalized", "exponent"]


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="grasscode", description=__doc__.splitlines()[0])
    p.add_argument("--threads", type=int, default=None, help="worker threads (env GRASSCODE_THREADS)")
    p.add_argument("--config", default=None, help="JSON file of defaults; flags take precedence")
    p.add_argument("--verbose", "-v", action="store_true", help="print resolved settings to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    # every option defaults to None so we can tell which ones were given
    g = sub.add_parser("generate", help="synthesise or ingest a channel dataset")
    g.add_argument("--model", choices=["ray", "kron", "csv"])
    g.add_argument("--mr", type=int)
    g.add_argument("--mv", type=int)
    g.add_argument("--mh", type=int)
    g.add_argument("--paths", type=int)
    g.add_argument("--spread", type=float, help="angle spread per path in degrees")
    g.add_argument("--rho-v", type=float)
    g.add_argument("--rho-h", type=float)
    g.add_argument("--n", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--csv-dir")
    g.add_argument("-o", "--output")

    t = sub.add_parser("train", help="train a codebook")
    t.add_argument("--data")
    t.add_argument("--method", choices=["bf-prod", "pc-prod", "vq"])
    t.add_argument("--r", type=int)
    t.add_argument("--bv", type=int)
    t.add_argument("--bh", type=int)
    t.add_argument("--bits", type=int, help="total bits B for the VQ baseline")
    t.add_argument("--split", type=float, help="train on this fraction of a seeded split")
    t.add_argument("--seed", type=int)
    t.add_argument("--max-iter", type=int)
    t.add_argument("--tol", type=float)
    t.add_argument("--restarts", type=int)
    t.add_argument("-o", "--output")

    e = sub.add_parser("eval", help="evaluate a codebook, CSV out")
    e.add_argument("--data")
    e.add_argument("--codebook")
    e.add_argument("--method", choices=["bf-prod", "pc-prod", "vq"])
    e.add_argument("--r", type=int)
    e.add_argument("--rho-db", type=float, nargs="+")
    e.add_argument("--split", type=float, help="evaluate on the held-out part of a seeded split")
    e.add_argument("--seed", type=int)
    e.add_argument("--select", choices=["chordal", "rate"], help="VQ codeword selection rule")
    e.add_argument("-o", "--output")

    b = sub.add_parser("bench", help="per-iteration clustering timings, CSV out")
    b.add_argument("--ns", type=int, nargs="+")
    b.add_argument("--r", type=int)
    b.add_argument("--N", type=int)
    b.add_argument("--K", type=int)
    b.add_argument("--K-prod", type=int)
    b.add_argument("--repeats", type=int)
    b.add_argument("--seed", type=int)
    b.add_argument("-o", "--output")
    return p


def resolve(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS[args.command])
    if args.config:
        with open(args.config) as fh:
            loaded = json.load(fh)
        # a config may be flat or keyed by subcommand
        section = loaded.get(args.command, loaded) if isinstance(loaded, dict) else {}
        for k, v in section.items():
            k = k.replace("-", "_")
            if k in cfg:
                cfg[k] = v
    for k in cfg:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    return cfg


def _load_data(path, split, seed, part):
    from .datagen import read_dataset, split as split_ds

    if path is None:
        raise GrasscodeError("--data is required")
    D = read_dataset(path)
    if split is None:
        return D
    return split_ds(D, split, seed)[0 if part == "train" else 1]


def _emit(text: str, output) -> None:
    if output:
        with open(output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_generate(cfg, threads=None) -> None:
    from .datagen import gen_kron_rayleigh, gen_ray_channel, read_csv_dir, write_dataset

    if not cfg["output"]:
        raise GrasscodeError("generate needs -o/--output")
    if cfg["model"] == "ray":
        D = gen_ray_channel(cfg["n"], cfg["mr"], cfg["mv"], cfg["mh"], n_paths=cfg["paths"],
                            angle_spread_deg=cfg["spread"], seed=cfg["seed"])
    elif cfg["model"] == "kron":
        D = gen_kron_rayleigh(cfg["n"], cfg["mr"], cfg["mv"], cfg["mh"], rho_v=cfg["rho_v"],
                              rho_h=cfg["rho_h"], seed=cfg["seed"])
    else:
        if not cfg["csv_dir"]:
            raise GrasscodeError("--model csv needs --csv-dir")
        D = read_csv_dir(cfg["csv_dir"], cfg["mv"], cfg["mh"])
    write_dataset(D, cfg["output"])
    print(f"wrote {len(D)} samples, geometry {D.geometry}", file=sys.stderr)


def cmd_train(cfg, threads=None) -> None:
    from .baseline_vq import vq_train
    from .beamforming import bf_train
    from .precoding import pc_train

    if not cfg["output"]:
        raise GrasscodeError("train needs -o/--output")
    D = _load_data(cfg["data"], cfg["split"], cfg["seed"], "train")
    kw = dict(max_iter=cfg["max_iter"], tol=cfg["tol"], seed=cfg["seed"], restarts=cfg["restarts"])
    if cfg["method"] == "bf-prod":
        C = bf_train(D.samples, cfg["bv"], cfg["bh"], **kw)
    elif cfg["method"] == "pc-prod":
        C = pc_train(D.samples, cfg["r"], cfg["bv"], cfg["bh"], threads=threads, **kw)
    else:
        C = vq_train(D.samples, cfg["r"], cfg["bits"], **kw)
    C.save(cfg["output"])
    print(f"trained {cfg['method']} codebook on {len(D)} samples", file=sys.stderr)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fmt(x) -> str:
    return repr(float(x))


def cmd_eval(cfg, threads=None) -> None:
    from .baseline_vq import vq_evaluate
    from .beamforming import bf_evaluate
    from .clustering import GrassmannCodebook, ProductCodebook
    from .precoding import db_to_linear, decompose, pc_evaluate

    if not cfg["codebook"]:
        raise GrasscodeError("--codebook is required")
    D = _load_data(cfg["data"], cfg["split"], cfg["seed"], "test")
    mr, mv, mh = D.geometry
    n, seed, method = len(D), cfg["seed"], cfg["method"]
    if method == "bf-prod":
        C = ProductCodebook.load(cfg["codebook"])
        res = bf_evaluate(D.samples, C)
        bv, bh = C.bits
        text = _csv(BF_HEADER, [[bv, bh, _fmt(res.gamma_av), _fmt(res.gamma_av_vs_full), n, seed]])
    elif method == "pc-prod":
        from ._parallel import ordered_map

        C = ProductCodebook.load(cfg["codebook"])
        r = C.k
        bv, bh = C.bits
        # the factors do not depend on rho_t, decompose once
        factors = ordered_map(lambda s: decompose(s.H, mh, mv, r), D.samples, threads)
        rows = []
        for db in cfg["rho_db"]:
            res = pc_evaluate(D.samples, C, r, float(db_to_linear(db)), factors=factors)
            rows.append(["pc-prod", mr, mv, mh, r, bv, bh, db, _fmt(res.r_av_quant),
                         _fmt(res.r_av_unquant), _fmt(res.r_av_fullsvd), _fmt(res.cq_bits_diag), n, seed])
        text = _csv(RATE_HEADER, rows)
    else:
        C = GrassmannCodebook.load(cfg["codebook"])
        rows = []
        for db in cfg["rho_db"]:
            res = vq_evaluate(D.samples, C, float(db_to_linear(db)), select=cfg["select"])
            # the VQ index carries all B bits; it is reported in the Bv column
            rows.append(["vq", mr, mv, mh, C.k, C.bits, 0, db, _fmt(res.r_av), "nan",
                         _fmt(res.r_av_fullsvd), _fmt(0.0), n, seed])
        text = _csv(RATE_HEADER, rows)
    _emit(text, cfg["output"])


def cmd_bench(cfg, threads=None) -> None:
    from .bench import run_bench

    res = run_bench(ns=cfg["ns"], r=cfg["r"], N=cfg["N"], K=cfg["K"], K_prod=cfg["K_prod"],
                    repeats=cfg["repeats"], seed=cfg["seed"])
    rows = [["time", row.n, row.method, _fmt(row.median_s), _fmt(row.normalized), ""] for row in res.rows]
    rows.append(["fit", "", "product", "", "", _fmt(res.exponent_product)])
    rows.append(["fit", "", "vq", "", "", _fmt(res.exponent_vq)])
    _emit(_csv(BENCH_HEADER, rows), cfg["output"])
    print(f"exponent product={res.exponent_product:.3f} vq={res.exponent_vq:.3f}", file=sys.stderr)


COMMANDS = {"generate": cmd_generate, "train": cmd_train, "eval": cmd_eval, "bench": cmd_bench}


def main(argv=None) -> int:
    from ._parallel import resolve_threads

    parser = _parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        threads = resolve_threads(args.threads)
        if args.verbose:
            print(json.dumps({"command": args.command, "threads": threads, **cfg}, default=str),
                  file=sys.stderr)
        COMMANDS[args.command](cfg, threads)
    except (GrasscodeError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"grasscode: error: {exc}", file=sys.stderr)
        return 1
    return 0
