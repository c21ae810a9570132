"""Independent brute-force oracles the tests check the library against.

Everything here is deliberately naive and shares no code with the library
paths it certifies: partitions are filtered exhaustively, closures run on
python sets, homomorphisms are enumerated from the full map space.
"""

import itertools

import numpy as np


def all_partitions(n):
    """All partitions of {0..n-1} as canonical least-member label tuples."""
    if n == 0:
        return [()]
    out = []

    def rec(i, labels, used):
        if i == n:
            out.append(tuple(labels))
            return
        for r in used:
            rec(i + 1, labels + [r], used)
        rec(i + 1, labels + [i], used + [i])

    rec(1, [0], [0])
    return out


def is_compatible(algebra, labels):
    n = algebra.size
    for t, (_, k) in enumerate(algebra.signature.symbols):
        if k == 0:
            continue
        for xs in itertools.product(range(n), repeat=k):
            for ys in itertools.product(range(n), repeat=k):
                if all(labels[a] == labels[b] for a, b in zip(xs, ys)):
                    if labels[algebra.evaluate(t, xs)] != labels[algebra.evaluate(t, ys)]:
                        return False
    return True


def refines(labels1, labels2):
    """labels1 <= labels2 as partitions."""
    blocks = {}
    for i, l in enumerate(labels1):
        blocks.setdefault(l, []).append(i)
    return all(len({labels2[x] for x in b}) == 1 for b in blocks.values())


def congruence_labels_oracle(algebra):
    """All compatible partitions of the algebra, as canonical label tuples."""
    return [p for p in all_partitions(algebra.size) if is_compatible(algebra, p)]


def cg_oracle(algebra, pairs):
    """Least compatible partition containing the pairs, by exhaustive filtering."""
    candidates = [p for p in congruence_labels_oracle(algebra)
                  if all(p[a] == p[b] for a, b in pairs)]
    least = [p for p in candidates if all(refines(p, q) for q in candidates)]
    assert len(least) == 1, "least compatible partition must be unique"
    return least[0]


def cg_matrix_oracle(algebra, pairs):
    """Congruence generation by pair-matrix fixpoint (independent of union-find).

    Closes under reflexivity, symmetry, transitivity and one-step translations
    f(..,u,..) ~ f(..,v,..) for every related pair (u,v).
    """
    n = algebra.size
    rel = np.eye(n, dtype=bool)
    for a, b in pairs:
        rel[a, b] = rel[b, a] = True
    while True:
        before = rel.sum()
        rel |= rel.T
        for _ in range(n):
            rel |= rel @ rel
        for t, (_, k) in enumerate(algebra.signature.symbols):
            if k == 0:
                continue
            for u in range(n):
                for v in range(n):
                    if not rel[u, v] or u == v:
                        continue
                    for pos in range(k):
                        for rest in itertools.product(range(n), repeat=k - 1):
                            xs = rest[:pos] + (u,) + rest[pos:]
                            ys = rest[:pos] + (v,) + rest[pos:]
                            rel[algebra.evaluate(t, xs), algebra.evaluate(t, ys)] = True
        if rel.sum() == before:
            break
    labels = [min(j for j in range(n) if rel[i, j]) for i in range(n)]
    return tuple(labels)


def naive_homs(source, target, onto=False):
    """All homomorphisms as map tuples, from the full target^source space."""
    out = []
    for mapping in itertools.product(range(target.size), repeat=source.size):
        good = True
        for t, (_, k) in enumerate(source.signature.symbols):
            for xs in itertools.product(range(source.size), repeat=k):
                lhs = mapping[source.evaluate(t, xs)]
                rhs = target.evaluate(t, tuple(mapping[x] for x in xs))
                if lhs != rhs:
                    good = False
                    break
            if not good:
                break
        if good and (not onto or set(mapping) == set(range(target.size))):
            out.append(mapping)
    return out


def naive_subuniverse_closure(algebra, seed):
    """Closure of a seed set under all operations, on python sets."""
    current = set(seed)
    while True:
        added = set()
        for t, (_, k) in enumerate(algebra.signature.symbols):
            if k == 0:
                added.add(algebra.evaluate(t, ()))
                continue
            for xs in itertools.product(sorted(current), repeat=k):
                added.add(algebra.evaluate(t, xs))
        if added <= current:
            return tuple(sorted(current))
        current |= added


def naive_product_closure(algebra, seed_tuples, width):
    """Closure of seed tuples inside algebra^width, on python sets of tuples."""
    current = set(tuple(s) for s in seed_tuples)
    while True:
        added = set()
        for t, (_, k) in enumerate(algebra.signature.symbols):
            if k == 0:
                added.add(tuple(algebra.evaluate(t, ()) for _ in range(width)))
                continue
            for xs in itertools.product(sorted(current), repeat=k):
                added.add(tuple(algebra.evaluate(t, tuple(x[c] for x in xs))
                                for c in range(width)))
        if added <= current:
            return sorted(current)
        current |= added


def image_partition(f_map, theta_labels, target_size):
    """Labels of the image partition of a congruence >= ker f under an onto map."""
    label = {}
    for a, l in enumerate(theta_labels):
        v = f_map[a]
        rep = f_map[l]
        label.setdefault(v, rep)
        label[v] = min(label[v], rep)
    # normalize to least member per block
    out = [None] * target_size
    for v in range(target_size):
        out[v] = label[v]
    reps = {}
    for v in range(target_size):
        reps.setdefault(out[v], []).append(v)
    final = [None] * target_size
    for _, members in reps.items():
        m = min(members)
        for v in members:
            final[v] = m
    return tuple(final)
