#!/usr/bin/env python3
"""Matching wall-clock across network sizes.

The aligner is O(n^2 m) in parameterized layer counts; this prints measured
times for growing synthetic networks so regressions are easy to spot.
"""

import argparse
import time

from iat import match_networks, standardize
from iat.core import ModuleNode
from iat.synthetic import bn, conv, descriptor, inverted_residual, linear


def build(name: str, n_bottlenecks: int, base: int) -> object:
    children = [conv("stem_conv", base, 3), bn("stem_bn", base)]
    modules = []
    ch = base
    for i in range(n_bottlenecks):
        out_ch = ch + (4 if i % 3 == 0 else 0)
        modules.append(inverted_residual(f"b{i}", ch, ch * 3, out_ch, max(ch // 4, 1)))
        ch = out_ch
    children.append(ModuleNode("body", tuple(modules)))
    children += [conv("head_conv", base * 8, ch, k=1), bn("head_bn", base * 8), linear("fc", 100, base * 8)]
    return descriptor(name, tuple(children))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", type=int, nargs="+", default=[9, 18, 36, 72])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    print(f"{'bottlenecks':>12} {'layers':>8} {'best (s)':>10} {'score':>10}")
    for n in args.sizes:
        target = standardize(build("t", n, 16).root)
        source = standardize(build("s", n, 24).root)
        layers = len(target.matchable_layers())
        best = float("inf")
        score = 0.0
        for _ in range(args.repeat):
            started = time.perf_counter()
            score = match_networks(target, source).network_score
            best = min(best, time.perf_counter() - started)
        print(f"{n:>12} {layers:>8} {best:>10.3f} {score:>10.3f}")


if __name__ == "__main__":
    main()
