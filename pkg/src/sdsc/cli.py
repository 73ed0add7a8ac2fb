"""Command-line client for the polar codec service.

Every subcommand talks to the HTTP API.  By default an in-process service
instance is used (no network, no setup); pass ``--server URL`` to target a
running ``sdsc serve`` deployment instead.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from .sim import SimRecord, write_csv

_AWGN_HELP = "for awgn the design value is Es/N0 in dB (converted to linear internally)"


def _client(server: str | None):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=None)
    import warnings

    with warnings.catch_warnings():
        # the in-process test client is a supported transport here; its
        # import-time deprecation chatter is not actionable for CLI users
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service import app

    return TestClient(app)


def _call(client, path: str, payload: dict) -> dict:
    resp = client.post(path, json=payload)
    if resp.status_code != 200:
        try:
            detail = resp.json().get("detail", resp.text)
        except Exception:
            detail = resp.text
        raise SystemExit(f"error: {detail}")
    return resp.json()


def _read_code_file(path: str) -> dict:
    lines = Path(path).read_text().strip().splitlines()
    if not lines:
        raise SystemExit(f"error: {path}: empty code file")
    head = lines[0].split()
    if len(head) != 2:
        raise SystemExit(f"error: {path}: first line must be 'N K'")
    try:
        N, K = int(head[0]), int(head[1])
        info = [int(t) for t in lines[1].split()] if len(lines) > 1 else []
    except ValueError:
        raise SystemExit(f"error: {path}: malformed code file")
    if len(info) != K:
        raise SystemExit(f"error: {path}: expected {K} info indices, found {len(info)}")
    return {"N": N, "info_set": info}


def _read_llr_file(path: str) -> list:
    values = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        tok = line.strip()
        if not tok:
            continue
        try:
            v = float(tok)
        except ValueError:
            raise SystemExit(f"error: {path}:{lineno}: cannot parse LLR {tok!r}")
        if math.isnan(v):
            raise SystemExit(f"error: {path}:{lineno}: LLR is NaN")
        values.append(v if math.isfinite(v) else ("inf" if v > 0 else "-inf"))
    return values


def _design_param(kind: str, value: float) -> float:
    if kind == "awgn":
        return 10.0 ** (value / 10.0)
    return value


def _parse_construction(text: str) -> tuple[str, float]:
    try:
        kind, _, raw = text.partition(":")
        return kind, float(raw)
    except ValueError:
        raise SystemExit(f"error: --construction must look like bec:0.5 or awgn:2.0, got {text!r}")


def cmd_construct(args) -> int:
    payload = {
        "n": args.n,
        "k": args.k,
        "channel_kind": args.channel,
        "design_param": _design_param(args.channel, args.design_param),
    }
    with _client(args.server) as client:
        out = _call(client, "/construct", payload)
    code = out["code"]
    lines = [f"{code['N']} {len(code['info_set'])}", " ".join(str(i) for i in code["info_set"])]
    if args.out:
        Path(args.out).write_text("\n".join(lines) + "\n")
        print(f"wrote ({code['N']},{len(code['info_set'])}) code to {args.out}")
    else:
        print("\n".join(lines))
    return 0


def cmd_decode(args) -> int:
    payload = {
        "code": _read_code_file(args.code),
        "llr": _read_llr_file(args.obs),
        "symbol_size": args.symbol_size,
        "f_rule": args.f_rule,
        "tie_break": args.tie_break,
    }
    with _client(args.server) as client:
        out = _call(client, "/decode", payload)
    print(out["bitstring"])
    tied = [i for i, t in enumerate(out["tie_flags"]) if t]
    if tied:
        print(f"note: tie-broken symbols: {' '.join(map(str, tied))}", file=sys.stderr)
    return 0


def cmd_patterns(args) -> int:
    payload = {"code": _read_code_file(args.code), "symbol_size": args.symbol_size}
    with _client(args.server) as client:
        out = _call(client, "/patterns", payload)
    for entry in out["symbols"]:
        print(f"{entry['index']} {entry['pattern']} {entry['dp_class']}")
    print(f"DP-II: {out['dp2_count']} of {out['total']}")
    return 0


def cmd_simulate(args) -> int:
    kind, design = _parse_construction(args.construction)
    sizes = [int(t) for t in args.symbol_sizes.split(",") if t]
    params = [float(t) for t in args.params.split(",") if t]
    payload = {
        "n": args.n,
        "k": args.k,
        "construction_kind": kind,
        "construction_param": _design_param(kind, design),
        "channel": args.channel,
        "params": params,
        "decoders": [
            {"symbol_size": m, "f_rule": args.f_rule, "tie_break": args.tie_break} for m in sizes
        ],
        "frames": args.frames,
        "min_frame_errors": args.min_frame_errors,
        "seed": args.seed,
        "workers": args.workers,
        "include_orderings": bool(args.report),
    }
    with _client(args.server) as client:
        out = _call(client, "/simulate", payload)
    records = [SimRecord(**r) for r in out["records"]]
    write_csv(records, args.out)
    print(f"wrote {len(records)} records to {args.out}")
    if args.report:
        for o in out["orderings"]:
            print(
                f"param={o['param']} M={o['m_small']} vs M={o['m_big']}: "
                f"delta={o['delta']:.3e} sigma={o['sigma']:.3e} "
                f"(+{o['n_small_only']}/-{o['n_big_only']}) -> {o['verdict']}"
            )
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sdsc", description=__doc__)
    p.add_argument("--server", default=None, help="base URL of a running service (default: in-process)")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="construct a code and write its description")
    c.add_argument("--n", type=int, required=True, help="block-length exponent, N = 2^n")
    c.add_argument("--k", type=int, required=True, help="information bits")
    c.add_argument("--channel", choices=("bec", "awgn"), default="bec")
    c.add_argument("--design-param", type=float, default=0.5,
                   help=f"design erasure probability for bec; {_AWGN_HELP}")
    c.add_argument("--out", default=None, help="output code file (stdout if omitted)")
    c.set_defaults(func=cmd_construct)

    d = sub.add_parser("decode", help="decode one observation file")
    d.add_argument("--code", required=True, help="code file from `construct --out`")
    d.add_argument("--obs", required=True, help="observation file, one LLR per line (inf/-inf allowed)")
    d.add_argument("--symbol-size", type=int, default=1, help="M; 1 = bit-decision SC, N = ML")
    d.add_argument("--f-rule", choices=("exact", "minsum"), default="exact")
    d.add_argument("--tie-break", choices=("zero", "lexicographic-min"), default="lexicographic-min")
    d.set_defaults(func=cmd_decode)

    t = sub.add_parser("patterns", help="per-symbol D/F patterns and DP-II counts")
    t.add_argument("--code", required=True)
    t.add_argument("--symbol-size", type=int, required=True)
    t.set_defaults(func=cmd_patterns)

    s = sub.add_parser("simulate", help="Monte Carlo FER/BER sweep, CSV output")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--construction", default="bec:0.5",
                   help=f"design point, bec:EPS or awgn:SNR ({_AWGN_HELP})")
    s.add_argument("--channel", choices=("bec", "awgn"), default="bec")
    s.add_argument("--params", required=True, help="comma-separated channel parameters")
    s.add_argument("--symbol-sizes", required=True, help="comma-separated symbol sizes M")
    s.add_argument("--frames", type=int, required=True, help="max frames per parameter cell")
    s.add_argument("--min-frame-errors", type=int, default=0,
                   help="early-stop once every decoder has this many frame errors (0 = run all frames)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--f-rule", choices=("exact", "minsum"), default="exact")
    s.add_argument("--tie-break", choices=("zero", "lexicographic-min"), default="lexicographic-min")
    s.add_argument("--out", required=True, help="output CSV path")
    s.add_argument("--report", action="store_true", help="print paired ordering verdicts")
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("serve", help="run the HTTP service")
    v.add_argument("--host", default="127.0.0.1")
    v.add_argument("--port", type=int, default=8000)
    v.set_defaults(func=cmd_serve)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
