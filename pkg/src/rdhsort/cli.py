"""Command-line front end: embed, extract, verify, analyze, capacity."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .bands import Band, BandThresholds
from .bits import as_bits, bits_to_bytes, bytes_to_bits, random_bits
from .codec import EmbedConfig, band_labels, band_table, capacity_scan, embed, extract, pass_layout
from .errors import ConfigError, RdhError
from .hia import PohMode, sort_by_hi
from .image import ColorParity, psnr, read_pgm, save_pgm
from .ou import TauConfig

EXIT_CODES = {
    "bad_image": 3,
    "image_too_small": 4,
    "bad_config": 5,
    "capacity_exceeded": 6,
    "header_overflow": 7,
    "bad_header": 8,
    "extraction_failed": 9,
    "verify_failed": 10,
    "io_error": 11,
    "rdh_error": 12,
}


class CliError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _add_config_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("embedding configuration")
    g.add_argument("--thresholds", type=_floats, metavar="T1,...,T6",
                   help="band thresholds (default 3.3,4.5,6,9,13,18)")
    g.add_argument("--bias", type=float, help="threshold increase per pass (default 0.3)")
    g.add_argument("--l-ulcf-size", type=int, help="size of the L_ULCF set (default 3000)")
    g.add_argument("--f-threshold", type=_floats, metavar="F[,F...]",
                   help="existence-probability thresholds, descending (default 0.01)")
    g.add_argument("--k", type=int, help="number of SV candidates (default 5)")
    g.add_argument("--poh-mode", choices=["eq14", "table2"], help="power-of-hiding formula (default table2)")
    g.add_argument("--tau1", type=int, help="underflow guard (default 0)")
    g.add_argument("--tau2", type=int, help="overflow guard (default 0)")
    g.add_argument("--max-levels", type=int, help="maximum embedding levels (default 8)")
    g.add_argument("--start-color", choices=["white", "black"], help="color of the first pass (default white)")
    g.add_argument("--min-segment-bits", type=int, help="skip bands that would carry fewer bits (default 80)")
    g.add_argument("--show-config", action="store_true", help="print the effective configuration and exit")


def _add_payload_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--payload", type=Path, help="payload file")
    src.add_argument("--bits", type=int, help="embed N pseudo-random bits")
    p.add_argument("--seed", type=int, default=0, help="seed for --bits (PCG64)")
    p.add_argument("--payload-format", choices=["bytes", "bits"], default="bytes",
                   help="payload file holds raw bytes or ASCII 0/1 characters")


def build_config(args) -> EmbedConfig:
    defaults = EmbedConfig()
    try:
        t = defaults.thresholds
        if args.thresholds is not None or args.bias is not None:
            vals = args.thresholds if args.thresholds is not None else [
                t.t_ulcf, t.t_vlcf, t.t_lcf, t.t_mcf, t.t_hcf, t.t_vhcf]
            if len(vals) != 6:
                raise ConfigError("--thresholds needs exactly six values")
            t = BandThresholds(*vals, bias_per_pass=args.bias if args.bias is not None else t.bias_per_pass)
        tau = TauConfig(args.tau1 if args.tau1 is not None else defaults.tau.tau1,
                        args.tau2 if args.tau2 is not None else defaults.tau.tau2)
        return EmbedConfig(
            thresholds=t,
            l_ulcf_size=args.l_ulcf_size if args.l_ulcf_size is not None else defaults.l_ulcf_size,
            f_thresholds=tuple(args.f_threshold) if args.f_threshold is not None else defaults.f_thresholds,
            k_max=args.k if args.k is not None else defaults.k_max,
            poh_mode=PohMode[args.poh_mode.upper()] if args.poh_mode else defaults.poh_mode,
            tau=tau,
            max_levels=args.max_levels if args.max_levels is not None else defaults.max_levels,
            start_color=ColorParity[args.start_color.upper()] if args.start_color else defaults.start_color,
            min_segment_bits=(args.min_segment_bits if args.min_segment_bits is not None
                              else defaults.min_segment_bits),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _read_image(path: Path):
    try:
        return read_pgm(path)
    except OSError as exc:
        raise CliError("io_error", f"cannot read {path}: {exc.strerror}") from None


def _write(path: Path, data: bytes) -> None:
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        raise CliError("io_error", f"cannot write {path}: {exc.strerror}") from None


def _load_payload(args) -> np.ndarray:
    if args.bits is not None:
        if args.bits < 0:
            raise ConfigError("--bits must be >= 0")
        return random_bits(args.bits, args.seed)
    try:
        raw = args.payload.read_bytes()
    except OSError as exc:
        raise CliError("io_error", f"cannot read {args.payload}: {exc.strerror}") from None
    if args.payload_format == "bits":
        text = raw.decode("ascii", errors="replace").strip()
        if any(c not in "01" for c in text):
            raise ConfigError("bit payload files may only contain 0 and 1")
        return as_bits([int(c) for c in text])
    return bytes_to_bits(raw)


def _fmt_db(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.4f}"


def _print_report(report, out) -> None:
    for key, value in report.summary().items():
        print(f"{key} {_fmt_db(value) if key == 'psnr_db' else value}", file=out)
    labels = band_labels(report.config.n_subbands)
    print("segments", file=out)
    print("pass,level,color,band,k,sv_p,sv_n,bits", file=out)
    start = report.config.start_color
    for s in report.segments:
        color = start if s.pass_index % 2 == 0 else start.other
        print(f"{s.pass_index},{s.pass_index // 2 + 1},{color.name.lower()},{labels[s.band_code]},"
              f"{s.k},{s.k - 1},{-s.k},{s.bits_embedded}", file=out)


def cmd_embed(args, out) -> int:
    cfg = build_config(args)
    cover = _read_image(args.cover)
    payload = _load_payload(args)
    marked, report = embed(cover, payload, cfg)
    _write(args.out, save_pgm(marked))
    _print_report(report, out)
    return 0


def cmd_extract(args, out) -> int:
    marked = _read_image(args.marked)
    cover, payload = extract(marked)
    _write(args.out, save_pgm(cover))
    if args.payload is not None:
        if args.payload_format == "bits":
            _write(args.payload, "".join(map(str, payload.tolist())).encode("ascii"))
        else:
            _write(args.payload, bits_to_bytes(payload))
    print(f"payload_bits {payload.size}", file=out)
    return 0


def cmd_verify(args, out) -> int:
    cfg = build_config(args)
    cover = _read_image(args.cover)
    payload = _load_payload(args)
    marked, report = embed(cover, payload, cfg)
    recovered, bits = extract(marked)
    ok = recovered == cover and np.array_equal(bits, payload)
    print(f"{'PASS' if ok else 'FAIL'} ec_bits={payload.size} psnr_db={_fmt_db(psnr(cover, marked))} "
          f"levels={report.levels} segments={len(report.segments)}", file=out)
    if not ok:
        raise CliError("verify_failed", "round trip did not reproduce the cover and payload")
    return 0


def _hia_block(title, table, out) -> None:
    print(f"# {title}", file=out)
    print("number,sv,n_sv,n_usv,hi,poh", file=out)
    for i, r in enumerate(table, start=1):
        hi = "inf" if math.isinf(r.hi) else f"{r.hi:.2f}"
        poh = "inf" if math.isinf(r.poh) else f"{r.poh:.0f}"
        print(f"{i},{{{r.sv.sv_n};{r.sv.sv_p}}},{r.n_sv},{r.n_usv},{hi},{poh}", file=out)


def profile_csv(profile) -> str:
    lines = ["intensity,n,m,f"]
    lines += [f"{h},{n},{m},{f:.6f}" for h, n, m, f in profile.rows()]
    return "\n".join(lines) + "\n"


def cmd_analyze(args, out) -> int:
    cfg = build_config(args)
    cover = _read_image(args.cover)
    color = cfg.start_color if args.pass_index % 2 == 0 else cfg.start_color.other
    layout = pass_layout(cover, color, args.pass_index, cfg)
    arr = cover.to_array(np.int64)
    labels = band_labels(cfg.n_subbands)

    print(f"# bands (pass {args.pass_index}, {color.name.lower()})", file=out)
    print("band,sites,pe_std", file=out)
    for code, pos in enumerate(layout.groups):
        e = layout.errors(arr, pos)
        std = f"{float(np.std(e)):.4f}" if e.size else ""
        print(f"{labels[code]},{pos.size},{std}", file=out)
    print(f"UHCF,{int(np.sum((layout.bands == Band.UHCF) & ~layout.yellow))},", file=out)
    print(f"yellow,{int(layout.yellow.sum())},", file=out)

    if args.band == "all":
        pos = np.concatenate(layout.groups)
    elif args.band in labels:
        pos = layout.groups[labels.index(args.band)]
    else:
        raise ConfigError(f"--band must be 'all' or one of {','.join(labels)}")
    table = band_table(layout.errors(arr, pos), cfg)
    _hia_block(f"hia raw order (scope {args.band})", table, out)
    _hia_block(f"hia sorted by hi (scope {args.band})", sort_by_hi(table), out)

    csv = profile_csv(layout.profile)
    if args.csv is not None:
        _write(args.csv, csv.encode("ascii"))
    else:
        print("# existence profile", file=out)
        out.write(csv)
    return 0


def cmd_capacity(args, out) -> int:
    cfg = build_config(args)
    cover = _read_image(args.cover)
    table = capacity_scan(cover, cfg)
    ks = ",".join(f"n_sv_k{k}" for k in range(1, cfg.k_max + 1))
    print(f"pass,color,band,sites,{ks},k_poh,capacity", file=out)
    for r in table.rows:
        n_sv = ",".join(str(v) for v in r.n_sv)
        print(f"{r.pass_index},{r.color.name.lower()},{r.label},{r.sites},{n_sv},{r.k_poh or ''},{r.capacity}",
              file=out)
    print(f"total,,,,{',' * (cfg.k_max - 1)},,{table.total}", file=out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rdhsort", description=__doc__)
    parser.add_argument("--show-config", action="store_true", help="print the default configuration and exit")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("embed", help="hide a payload in a PGM cover")
    p.add_argument("--cover", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True, help="marked PGM to write")
    _add_payload_args(p)
    _add_config_args(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("extract", help="recover payload and cover from a marked PGM")
    p.add_argument("--marked", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True, help="recovered cover PGM to write")
    p.add_argument("--payload", type=Path, help="file for the extracted payload")
    p.add_argument("--payload-format", choices=["bytes", "bits"], default="bytes")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("verify", help="embed then extract in memory and compare")
    p.add_argument("--cover", type=Path, required=True)
    _add_payload_args(p)
    _add_config_args(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("analyze", help="band populations, HIA table and existence profile")
    p.add_argument("--cover", type=Path, required=True)
    p.add_argument("--pass-index", type=int, default=0)
    p.add_argument("--band", default="all", help="HIA scope: 'all' or a band label such as ULCF1")
    p.add_argument("--csv", type=Path, help="write the existence profile CSV here instead of stdout")
    _add_config_args(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("capacity", help="level-1 capacity per band")
    p.add_argument("--cover", type=Path, required=True)
    _add_config_args(p)
    p.set_defaults(func=cmd_capacity)
    return parser


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.show_config:
            cfg = build_config(args) if hasattr(args, "thresholds") else EmbedConfig()
            print(json.dumps(cfg.as_dict(), indent=2), file=out)
            return 0
        if args.command is None:
            parser.print_usage(err)
            return 2
        return args.func(args, out)
    except RdhError as exc:
        print(f"error: {exc.code}: {exc}", file=err)
        return EXIT_CODES.get(exc.code, EXIT_CODES["rdh_error"])
    except CliError as exc:
        print(f"error: {exc.code}: {exc}", file=err)
        return EXIT_CODES[exc.code]


def main() -> None:
    sys.exit(run())
