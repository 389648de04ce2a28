"""Command-line surface: ssim, fid, story-score, and report subcommands.

Every score emitted here comes straight from the library calls on the same
inputs; the CLI only handles argument parsing, file expansion, and report
serialization, so CLI and library results are bit-identical.

Exit codes: 0 success; 2 invalid flags, schema violations, mixed report
kinds; 3 I/O, decode, or file-format failures; 4 numeric failures;
5 embedding provider failures.
"""

from __future__ import annotations

import argparse
import dataclasses
import glob
import os
import sys

from . import image_io, report, storyscore
from .fid import FidOptions, fid
from .ssim import SsimParams, batch_ssim
from .embed_client import ProviderConfig
from .errors import (
    DecodeError,
    FormatError,
    InvalidInputError,
    NumericError,
    ProviderError,
    WriteError,
)
from .features_io import FORMATS as FEATURE_FORMATS
from .features_io import read_features
from .version import __version__

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NUMERIC = 4
EXIT_PROVIDER = 5

IMAGE_EXTENSIONS = (".png", ".jpg", ".jpeg", ".bmp", ".gif", ".tif", ".tiff", ".webp")


def expand_images(pattern: str) -> list[str]:
    """Resolve a directory, glob, or file path to a sorted list of images.

    Lexicographic order keeps batch order, and therefore indexed pairing,
    stable across platforms.
    """
    if os.path.isdir(pattern):
        names = [
            os.path.join(pattern, name)
            for name in os.listdir(pattern)
            if name.lower().endswith(IMAGE_EXTENSIONS)
        ]
    elif os.path.isfile(pattern):
        names = [pattern]
    else:
        names = [p for p in glob.glob(pattern) if os.path.isfile(p)]
    if not names:
        raise InvalidInputError(f"no images match {pattern!r}")
    return sorted(names)


def _write_report(rep: report.ScoreReport, out, format: str) -> None:
    if out is None:
        sys.stdout.write(rep.render(format))
    else:
        rep.write(out, format)


def cmd_ssim(args) -> int:
    params = SsimParams(window_size=args.window, sigma=args.sigma)
    # "bilinear" on the CLI means: resample everything, targets included, to
    # the first candidate image's size.
    policy = "strict" if args.resize == "strict" else "bilinear_to_first"
    candidates = image_io.load_batch(expand_images(args.candidates), resize_policy=policy)
    targets = image_io.load_batch(expand_images(args.targets), resize_policy=policy,
                                  target_shape=candidates.shape)
    result = batch_ssim(candidates.images, targets.images,
                             pairing=args.pairing, params=params)
    pairs = [
        {
            "candidate": os.path.basename(candidates.source_paths[p.candidate_index]),
            "target": os.path.basename(targets.source_paths[p.target_index]),
            "score": p.score,
        }
        for p in result.pairs
    ]
    label = os.path.basename(os.path.normpath(args.candidates.rstrip("/*")))
    row = report.ReportRow(label=label or args.candidates,
                           scores={"mean_ssim": result.aggregate}, pairs=pairs)
    rep = report.ScoreReport(
        metric="ssim",
        command="ssim",
        parameters={
            "window": args.window,
            "sigma": args.sigma,
            "k1": params.k1,
            "k2": params.k2,
            "dynamic_range": params.dynamic_range,
            "pairing": args.pairing,
            "resize": args.resize,
            "n_candidates": len(candidates),
            "n_targets": len(targets),
        },
        rows=[row],
    )
    _write_report(rep, args.out, args.format)
    return EXIT_OK


def cmd_fid(args) -> int:
    options = FidOptions(eps=args.eps, covariance_mode=args.covariance)
    cand = read_features(args.candidate_features, format=args.feature_format)
    targ = read_features(args.target_features, format=args.feature_format)
    value = fid(cand, targ, opts=options)
    label = os.path.splitext(os.path.basename(args.candidate_features))[0]
    rep = report.ScoreReport(
        metric="fid",
        command="fid",
        parameters={
            "eps": args.eps,
            "covariance": args.covariance,
            "feature_format": args.feature_format,
            "n_candidates": int(cand.shape[0]),
            "n_targets": int(targ.shape[0]),
            "dim": int(cand.shape[1]),
        },
        rows=[report.ReportRow(label=label, scores={"fid": value})],
    )
    _write_report(rep, args.out, args.format)
    return EXIT_OK


def cmd_story_score(args) -> int:
    manifest = storyscore.load_manifest(args.corpus)
    if args.gamma is not None:
        if not 0.0 <= args.gamma <= 1.0:
            raise InvalidInputError(f"--gamma must lie in [0, 1], got {args.gamma}")
        manifest = dataclasses.replace(manifest, gamma=args.gamma)
    provider = None
    if args.provider is not None:
        if args.provider == "http" and not args.endpoint:
            raise InvalidInputError("--provider http needs --endpoint")
        if args.provider == "file" and not args.lookup:
            raise InvalidInputError("--provider file needs --lookup")
        provider = ProviderConfig(kind=args.provider, endpoint_url=args.endpoint,
                                  lookup_path=args.lookup)
    row = storyscore.evaluate_manifest(manifest, provider=provider)
    rep = report.ScoreReport(
        metric="story",
        command="story-score",
        parameters={
            "gamma": manifest.gamma,
            "n_references": len(manifest.references),
            "provider": args.provider or "pinned",
        },
        rows=[report.ReportRow(
            label=row.label,
            scores={"similarity": row.similarity, "plot": row.plot, "story": row.story},
        )],
    )
    _write_report(rep, args.out, args.format)
    return EXIT_OK


def cmd_report(args) -> int:
    inputs = [report.load_report(path) for path in args.inputs]
    merged = report.merge_reports(
        inputs, parameters={"inputs": [str(p) for p in args.inputs]}
    )
    _write_report(merged, args.out, args.format)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paneval",
        description="Evaluation metrics for generated comic panels and stories: "
        "SSIM over image batches, FID over feature batches, and blended "
        "story scores over text embeddings.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ssim", help="batch SSIM between candidate and target images")
    p.add_argument("--candidates", required=True, help="image directory or glob")
    p.add_argument("--targets", required=True, help="image directory or glob")
    p.add_argument("--pairing", choices=("cross", "indexed"), default="cross")
    p.add_argument("--window", type=int, default=11, help="Gaussian window size (odd)")
    p.add_argument("--sigma", type=float, default=1.5, help="Gaussian window sigma")
    p.add_argument("--resize", choices=("strict", "bilinear"), default="strict",
                   help="strict: sizes must match; bilinear: resample to first candidate")
    p.add_argument("--out", default=None, help="report path (stdout if omitted)")
    p.add_argument("--format", choices=report.FORMATS, default="json")
    p.set_defaults(func=cmd_ssim)

    p = sub.add_parser("fid", help="FID between candidate and target feature batches")
    p.add_argument("--candidate-features", required=True)
    p.add_argument("--target-features", required=True)
    p.add_argument("--feature-format", choices=FEATURE_FORMATS, default="binary")
    p.add_argument("--eps", type=float, default=1e-6,
                   help="diagonal regularizer added to both covariances")
    p.add_argument("--covariance", choices=("full", "diagonal"), default="full")
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=report.FORMATS, default="json")
    p.set_defaults(func=cmd_fid)

    p = sub.add_parser("story-score", help="blended story score from a corpus manifest")
    p.add_argument("--corpus", required=True, help="manifest JSON path")
    p.add_argument("--gamma", type=float, default=None,
                   help="override the manifest gamma")
    p.add_argument("--provider", choices=("http", "file"), default=None,
                   help="embedding source for documents without pinned embeddings")
    p.add_argument("--endpoint", default=None, help="embedding service URL (http provider)")
    p.add_argument("--lookup", default=None, help="hash-to-embedding JSON path (file provider)")
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=report.FORMATS, default="json")
    p.set_defaults(func=cmd_story_score)

    p = sub.add_parser("report", help="merge same-metric reports into one table")
    p.add_argument("--inputs", nargs="+", required=True, help="input report JSON paths")
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=report.FORMATS, default="json")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ProviderError as exc:
        print(f"paneval: provider error: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    except NumericError as exc:
        print(f"paneval: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DecodeError, FormatError, WriteError) as exc:
        print(f"paneval: {exc}", file=sys.stderr)
        return EXIT_IO
    except InvalidInputError as exc:
        print(f"paneval: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"paneval: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
