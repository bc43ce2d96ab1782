#!/usr/bin/env python3
"""End-to-end demo: build two synthetic CNNs, match them and transfer weights.

Writes descriptor/weight files to a temp directory and runs the same steps
the `iat transfer` subcommand performs, printing what happened at each stage.
"""

import argparse
import tempfile
from pathlib import Path

import numpy as np

from iat import (
    apply_transfer,
    match_networks,
    save_descriptor,
    save_weights,
    similarity,
    standardize,
)
from iat.synthetic import efficientnet_style, random_weights, rexnet_style


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--transfer", default="clip", choices=["clip", "full", "magnitude", "clipnorm"])
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    source_desc = efficientnet_style("source_eff")
    target_desc = rexnet_style("target_rex")

    source = standardize(source_desc.root)
    target = standardize(target_desc.root)
    print(f"source: {len(source.blocks)} blocks, {len(source.matchable_layers())} parameterized layers")
    print(f"target: {len(target.blocks)} blocks, {len(target.matchable_layers())} parameterized layers")
    print(f"similarity: {similarity(target, source):.4f}")

    matching = match_networks(target, source)
    print(f"\nmatched {len(matching.pairs)} layer pairs, network score {matching.network_score:.3f}")
    for (start, stop), j in matching.block_pairs[:8]:
        targets = ", ".join(b.layers[0].path for b in target.blocks[start:stop])
        print(f"  source block {j} -> target blocks [{start}, {stop}): {targets}")

    source_weights = random_weights(source_desc, rng)
    target_weights = random_weights(target_desc, rng)
    result, report = apply_transfer(matching, source_weights, target_weights, args.transfer)
    print(
        f"\ntransfer ({args.transfer}): {report.total_copied} of "
        f"{report.total_target_elements} target elements overwritten "
        f"({report.overall_fraction:.1%})"
    )
    for warning in report.warnings:
        print(f"  warning: {warning}")

    out_dir = Path(tempfile.mkdtemp(prefix="iat_demo_"))
    (out_dir / "source.json").write_bytes(save_descriptor(source_desc))
    (out_dir / "target.json").write_bytes(save_descriptor(target_desc))
    (out_dir / "source.iatw").write_bytes(save_weights(source_weights))
    (out_dir / "transferred.iatw").write_bytes(save_weights(result))
    print(f"\nartifacts written to {out_dir}")


if __name__ == "__main__":
    main()
