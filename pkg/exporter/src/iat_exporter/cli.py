"""Export/import CLI bridging zoo models to the descriptor/weight formats."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import torch

from .walk import export_model, import_weights
from .zoo import available_models, create_model


def _load_overrides(path: str | None) -> dict[str, str] | None:
    if not path:
        return None
    return json.loads(Path(path).read_text())


def export_main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="iat-export",
        description="Export a zoo model's structure and weights to descriptor/IATW files.",
    )
    parser.add_argument("model", help="model name (torchvision zoo or bundled)")
    parser.add_argument("--out-dir", required=True)
    parser.add_argument("--overrides", help="JSON file mapping class names to layer kinds")
    parser.add_argument("--list", action="store_true", help="list available model names and exit")
    args = parser.parse_args(argv)

    if args.list:
        print("\n".join(available_models()))
        return 0
    try:
        model = create_model(args.model)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    result = export_model(model, args.model, _load_overrides(args.overrides))
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / f"{args.model}.json").write_bytes(result.descriptor)
    (out_dir / f"{args.model}.iatw").write_bytes(result.weights)
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    print(f"wrote {out_dir / args.model}.json and {out_dir / args.model}.iatw")
    return 0


def import_main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="iat-import",
        description="Load an IATW weight file into a zoo model.",
    )
    parser.add_argument("model", help="model name (torchvision zoo or bundled)")
    parser.add_argument("--weights", required=True)
    parser.add_argument("--out", help="save the resulting state dict here (torch.save)")
    parser.add_argument("--overrides", help="JSON file mapping class names to layer kinds")
    args = parser.parse_args(argv)

    try:
        model = create_model(args.model)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    try:
        report = import_weights(
            model, Path(args.weights).read_bytes(), _load_overrides(args.overrides)
        )
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    print(f"assigned {len(report.assigned)} tensors")
    for key in report.unmatched:
        print(f"unmatched: {key}", file=sys.stderr)
    for key in report.missing:
        print(f"missing: {key}", file=sys.stderr)
    if args.out:
        torch.save(model.state_dict(), args.out)
        print(f"state dict saved to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(export_main())
