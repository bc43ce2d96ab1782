#!/usr/bin/env python3
"""Pairwise similarity matrix over a family of synthetic architectures."""

import argparse

from iat import similarity, standardize
from iat.synthetic import efficientnet_style, flat_singles, rexnet_style


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.parse_args()

    family = {
        "eff-s": efficientnet_style("eff_s"),
        "eff-m": efficientnet_style(
            "eff_m", stem_ch=32, stage_widths=(16, 24, 48), stage_depths=(2, 3, 3)
        ),
        "eff-l": efficientnet_style(
            "eff_l", stem_ch=40, stage_widths=(24, 32, 56, 112), stage_depths=(2, 3, 3, 4)
        ),
        "rex-s": rexnet_style("rex_s"),
        "rex-l": rexnet_style("rex_l", stem_ch=40, widths=(20, 34, 48, 64, 80, 96, 112)),
        "plain": flat_singles("plain", n_convs=6, ch=32),
    }
    nets = {name: standardize(desc.root) for name, desc in family.items()}

    names = list(nets)
    header = " " * 7 + " ".join(f"{n:>7}" for n in names)
    print(header)
    for a in names:
        row = [f"{similarity(nets[a], nets[b]):7.4f}" for b in names]
        print(f"{a:>7}" + " ".join(row))


if __name__ == "__main__":
    main()
