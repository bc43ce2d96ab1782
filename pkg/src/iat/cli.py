"""Command line surface: standardize / similarity / match / transfer.

Exit codes: 0 success, 1 internal error, 2 usage or validation error.
All JSON outputs have stable key order.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .core import ArchDescriptor, Tensor, TensorRole, WeightStore, tensor_key, validate
from .matching import MATCHERS, match_networks
from .model_io import ModelIOError, load_descriptor, load_weights, save_weights
from .similarity import similarity
from .standardize import standardize
from .transfer import TransferOperator, apply_transfer, fan_in


def _read_descriptor(path: str) -> ArchDescriptor:
    return load_descriptor(Path(path).read_bytes())


def _read_store(path: str, descriptor: ArchDescriptor, label: str) -> WeightStore:
    store = load_weights(Path(path).read_bytes())
    violations = validate(descriptor, store)
    if violations:
        raise ModelIOError("invalid_weights", f"{label}: " + "; ".join(violations))
    return store


def _cmd_standardize(args) -> int:
    descriptor = _read_descriptor(args.arch)
    net = standardize(descriptor.root)
    if args.json:
        obj = {
            "name": descriptor.name,
            "blocks": [
                {
                    "index": i,
                    "layers": [{"path": l.path, "kind": l.kind.value} for l in block.layers],
                }
                for i, block in enumerate(net.blocks)
            ],
        }
        print(json.dumps(obj, indent=2))
    else:
        for i, block in enumerate(net.blocks):
            print(f"block {i} ({len(block.layers)} layers):")
            for layer in block.layers:
                print(f"  {layer.path} ({layer.kind.value})")
    return 0


def _cmd_similarity(args) -> int:
    a = standardize(_read_descriptor(args.arch_a).root)
    b = standardize(_read_descriptor(args.arch_b).root)
    print(f"{similarity(a, b):.4f}")
    return 0


def _matching_to_obj(matching) -> dict:
    return {
        "pairs": [
            {"target_path": p.target_path, "source_path": p.source_path, "score": p.score}
            for p in matching.pairs
        ],
        "network_score": matching.network_score,
    }


def _cmd_match(args) -> int:
    target = standardize(_read_descriptor(args.target).root)
    source = standardize(_read_descriptor(args.source).root)
    matching = match_networks(target, source, matcher=args.matcher, seed=args.seed)
    text = json.dumps(_matching_to_obj(matching), indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return 0


def _fan_in_uniform_init(descriptor: ArchDescriptor, seed: int) -> WeightStore:
    rng = np.random.default_rng(seed)
    entries = {}
    for layer in descriptor.layers():
        weight = layer.weight
        for spec in layer.params:
            fan = fan_in(weight.shape if weight is not None else spec.shape)
            bound = math.sqrt(6.0 / fan)
            entries[tensor_key(layer.path, spec.role)] = Tensor(
                rng.uniform(-bound, bound, size=spec.shape).astype(np.float32)
            )
    return WeightStore(entries)


def _cmd_transfer(args) -> int:
    target_desc = _read_descriptor(args.target_arch)
    source_desc = _read_descriptor(args.source_arch)
    source_weights = _read_store(args.source_weights, source_desc, "source weights")

    if args.target_weights:
        target_weights = _read_store(args.target_weights, target_desc, "target weights")
    elif args.init:
        target_weights = _fan_in_uniform_init(target_desc, args.seed)
    else:
        print("error: provide --target-weights or --init", file=sys.stderr)
        return 2

    target_net = standardize(target_desc.root)
    source_net = standardize(source_desc.root)
    matching = match_networks(target_net, source_net, matcher=args.matcher, seed=args.seed)
    result, report = apply_transfer(
        matching, source_weights, target_weights, op=args.transfer
    )
    Path(args.out).write_bytes(save_weights(result))
    if args.report:
        Path(args.report).write_text(json.dumps(report.to_json_dict(), indent=2) + "\n")
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iat",
        description="Transfer trained parameters between network architectures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("standardize", help="collapse an architecture into blocks")
    p.add_argument("arch", help="architecture descriptor (JSON)")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=_cmd_standardize)

    p = sub.add_parser("similarity", help="architecture similarity in [0, 1]")
    p.add_argument("arch_a")
    p.add_argument("arch_b")
    p.set_defaults(func=_cmd_similarity)

    p = sub.add_parser("match", help="match layers of two architectures")
    p.add_argument("target")
    p.add_argument("source")
    p.add_argument("--matcher", choices=MATCHERS, default="dp")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write matching JSON here instead of stdout")
    p.set_defaults(func=_cmd_match)

    p = sub.add_parser("transfer", help="full pipeline: standardize, match, transfer")
    p.add_argument("--target-arch", required=True)
    p.add_argument("--source-arch", required=True)
    p.add_argument("--source-weights", required=True)
    p.add_argument("--target-weights")
    p.add_argument("--init", choices=["fan-in-uniform"], help="initialize missing target weights")
    p.add_argument("--matcher", choices=MATCHERS, default="dp")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--transfer", choices=[op.value for op in TransferOperator], default="clip")
    p.add_argument("--out", required=True)
    p.add_argument("--report", help="write a JSON transfer report")
    p.set_defaults(func=_cmd_transfer)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ModelIOError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # pragma: no cover - defensive
        print(f"internal error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
