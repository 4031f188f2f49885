"""Naive local-optimum census used as an independent check of the vectorised one.

Shares no code with the package: genotypes are Python integers, Gray decoding
goes through an explicit loop and F6 is written with the math module.

Grid values are measured from the centre of the range, so an index and its
mirror decode to exactly opposite values and F6's symmetric ties stay exact.
"""

import math


def schaffer(x, y):
    r2 = x * x + y * y
    return 0.5 + (math.sin(math.sqrt(r2)) ** 2 - 0.5) / (1.0 + 0.001 * r2) ** 2


def gray_decode(g):
    k = 0
    while g:
        k ^= g
        g >>= 1
    return k


def census(n_bits, gray, lower=-100.0, upper=100.0, func=schaffer):
    """Set of phenotype indices ``k1 | k2 << n_bits`` that are Hamming-1 local optima."""
    mask = (1 << n_bits) - 1
    top = (1 << n_bits) - 1
    total = 2 * n_bits
    centre, half = (lower + upper) / 2, (upper - lower) / 2
    cache = {}

    def fitness(genotype):
        if genotype not in cache:
            a, b = genotype & mask, genotype >> n_bits
            if gray:
                a, b = gray_decode(a), gray_decode(b)
            x = centre + half * ((2.0 * a - top) / top)
            y = centre + half * ((2.0 * b - top) / top)
            cache[genotype] = (func(x, y), a | (b << n_bits))
        return cache[genotype]

    optima = set()
    for genotype in range(1 << total):
        f, phenotype = fitness(genotype)
        if all(fitness(genotype ^ (1 << i))[0] >= f for i in range(total)):
            optima.add(phenotype)
    return optima
