import random

from onetree import (
    ExactSolver,
    SampleAugmentSolver,
    basis_cost,
    compute_K,
    compute_layers,
    monotonize,
    prune,
    route,
    verify_layerset,
)
from onetree.corpus import random_instance
from onetree.routing import RentBuyDecomposition


def fake_decompositions(buys, rents):
    return tuple(
        RentBuyDecomposition(
            index=i,
            threshold=float(2**i),
            bought=frozenset(),
            rent_cost=float(r),
            buy_cost=float(b),
            core=frozenset({0}),
        )
        for i, (b, r) in enumerate(zip(buys, rents))
    )


def test_compute_K_values():
    assert compute_K(1, 0.5) == 0
    assert compute_K(2, 1.0) == 1
    assert compute_K(100, 0.1) == 49
    assert compute_K(8, 1.0) == 3  # exact power boundary


def test_monotonize_identical_trees_unchanged(path3):
    t = route(path3, (0, 1))
    assert monotonize([t, t], 1.0) == (t, t)


def test_monotonize_descending_pass_fires(triangle_cheap_root):
    g = triangle_cheap_root
    expensive = route(g, (0, 2))  # r-a plus the length-10 edge
    cheap = route(g, (0, 1))  # the two unit edges
    out = monotonize([expensive, cheap], 1.0)
    assert out == (cheap, cheap)


def test_monotonize_ascending_pass_fires(triangle_cheap_root):
    g = triangle_cheap_root
    expensive = route(g, (0, 2))
    cheap = route(g, (0, 1))
    out = monotonize([cheap, expensive], 1.0)
    assert out == (cheap, cheap)
    # buy/rent monotonicity restored
    from onetree import decompose

    decs = [decompose(t, i, 1.0) for i, t in enumerate(out)]
    assert decs[0].buy_cost >= decs[1].buy_cost
    assert decs[0].rent_cost <= decs[1].rent_cost


def test_monotonize_improves_each_index():
    rng = random.Random(21)
    for k in range(20):
        g = random_instance(rng)
        eps = 0.5
        top = compute_K(g.total_demand, eps)
        solver = SampleAugmentSolver(trials=2)
        raw = [solver.solve(g, (1 + eps) ** i, seed=k + i) for i in range(top + 1)]
        out = monotonize(raw, eps)
        for i in range(top + 1):
            m = (1 + eps) ** i
            here = basis_cost(out[i], m)
            if i > 0:
                assert here <= basis_cost(out[i - 1], m) * (1 + 1e-9)
            if i < top:
                assert here <= basis_cost(out[i + 1], m) * (1 + 1e-9)


def test_prune_path_example():
    # buy costs [2, 1] with gamma=2: index 1 is not a strict drop
    decs = fake_decompositions([2, 1], [0, 1])
    kept, survivors = prune(decs, 2.0, 5.236)
    assert survivors == (0,)
    assert kept == (0,)


def test_prune_keeps_strictly_geometric_sequences():
    decs = fake_decompositions([64, 16, 4, 1], [0, 1, 8, 64])
    kept, survivors = prune(decs, 2.0, 5.236)
    assert survivors == (0, 1, 2, 3)
    assert kept == (0, 1, 2, 3)


def test_prune_zero_buy_tail_keeps_single_zero():
    decs = fake_decompositions([4, 1, 0, 0], [0, 1, 2, 3])
    kept, survivors = prune(decs, 2.0, 5.236)
    assert survivors == (0, 1, 2)
    assert 3 not in survivors


def test_layerset_invariants_on_random_instances():
    rng = random.Random(3)
    for k in range(40):
        g = random_instance(rng)
        layers = compute_layers(g, 0.5, ExactSolver(), 2.0, 5.236, seed=k)
        verify_layerset(layers)
        assert 0 in layers.kept
        assert max(layers.kept_buy) in layers.kept
        decs = layers.decompositions
        for i in range(layers.top_index):
            assert decs[i].buy_cost >= decs[i + 1].buy_cost - 1e-9
            assert decs[i].rent_cost <= decs[i + 1].rent_cost + 1e-9


def test_structure_indexing_caps():
    rng = random.Random(8)
    for k in range(30):
        g = random_instance(rng)
        gamma, delta = 2.0, 5.236
        layers = compute_layers(g, 0.5, SampleAugmentSolver(trials=4), gamma, delta, seed=k)
        verify_layerset(layers)
        decs = layers.decompositions
        for want in range(layers.top_index + 1):
            anchor = max(j for j in layers.kept_buy if j <= want)
            i = min(i for i in layers.kept if i >= anchor)
            assert decs[i].buy_cost <= gamma * decs[want].buy_cost + 1e-9
            assert decs[i].rent_cost <= delta * decs[want].rent_cost + 1e-9


def test_geometric_drop_along_kept_indices():
    rng = random.Random(13)
    for k in range(30):
        g = random_instance(rng)
        gamma, delta = 2.0, 5.236
        layers = compute_layers(g, 0.5, ExactSolver(), gamma, delta, seed=k)
        decs = layers.decompositions
        survivors = layers.kept_buy
        for a, b in zip(survivors, survivors[1:]):
            assert decs[b].buy_cost < decs[a].buy_cost / gamma
        kept_desc = sorted(layers.kept, reverse=True)
        for a, b in zip(kept_desc, kept_desc[1:]):
            assert decs[b].rent_cost < decs[a].rent_cost / delta


def test_first_index_always_fully_bought():
    rng = random.Random(44)
    for k in range(20):
        g = random_instance(rng)
        layers = compute_layers(g, 1.0, ExactSolver(), 2.0, 5.236, seed=k)
        assert layers.decompositions[0].rent_cost == 0.0
