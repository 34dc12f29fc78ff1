"""Mapper behaviour: IDW arithmetic, fidelity at stored points, MLP fit,
checkpoint round-trips."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sketchsynth import mapper
from sketchsynth.errors import DimensionMismatch, EmptyStore, MalformedDocument, UnsupportedVersion
from sketchsynth.mapper import (
    ExampleStore,
    MapperConfig,
    TrainingExample,
    add_example,
)


def example(input_vec, target_vec, created_at="2024-01-01T00:00:00+00:00"):
    return TrainingExample(tuple(input_vec), tuple(target_vec), created_at)


def store_of(*pairs):
    store = ExampleStore()
    for inp, tgt in pairs:
        store = add_example(store, example(inp, tgt))
    return store


def unit_input(axis, distance):
    v = np.zeros(32)
    v[axis] = distance
    return v


def test_add_example_appends_in_order():
    store = store_of(
        (np.zeros(32), np.zeros(16)),
        (np.ones(32), np.ones(16)),
    )
    assert len(store) == 2
    assert store.examples[0].input == (0.0,) * 32


def test_add_example_rejects_bad_dims():
    with pytest.raises(DimensionMismatch):
        add_example(ExampleStore(), example(np.zeros(31), np.zeros(16)))
    with pytest.raises(DimensionMismatch):
        add_example(ExampleStore(), example(np.zeros(32), np.zeros(15)))


def test_duplicates_are_kept():
    ex = example(np.zeros(32), np.zeros(16))
    store = add_example(add_example(ExampleStore(), ex), ex)
    assert len(store) == 2


def test_train_empty_store():
    with pytest.raises(EmptyStore):
        mapper.train(ExampleStore(), MapperConfig())


def test_single_example_maps_constantly():
    target = np.linspace(-0.8, 0.8, 16)
    store = store_of((np.full(32, 0.25), target))
    model, loss = mapper.train(store, MapperConfig())
    assert loss == 0.0
    for query in (np.zeros(32), np.ones(32), np.full(32, -1.0)):
        assert np.allclose(model.map_latent(query), target, atol=1e-12)


def test_exact_match_short_circuit():
    target = np.linspace(-1, 1, 16)
    x = np.full(32, 0.5)
    store = store_of((x, target), (np.zeros(32), np.zeros(16)))
    model, _ = mapper.train(store, MapperConfig())
    assert np.allclose(model.map_latent(x), target, atol=0)


def test_duplicate_inputs_with_conflicting_targets_mean():
    x = np.full(32, 0.1)
    store = store_of((x, np.zeros(16)), (x, np.ones(16)))
    model, _ = mapper.train(store, MapperConfig())
    assert np.allclose(model.map_latent(x), 0.5, atol=1e-12)


def test_idw_hand_computed_weights():
    # neighbours at distances 1 and 2, power 2: weights 1 and 1/4,
    # targets 0 and 1 -> (0*1 + 1*0.25) / 1.25 = 0.2 per dimension
    query = np.zeros(32)
    store = store_of(
        (unit_input(0, 1.0), np.zeros(16)),
        (unit_input(1, 2.0), np.ones(16)),
    )
    model, _ = mapper.train(store, MapperConfig(k=2, power=2.0))
    out = model.map_latent(query)
    assert np.allclose(out, 0.2, atol=1e-12)


def test_equidistant_neighbours_average():
    query = np.zeros(32)
    store = store_of(
        (unit_input(0, 1.0), np.full(16, -0.4)),
        (unit_input(1, 1.0), np.full(16, 0.8)),
    )
    model, _ = mapper.train(store, MapperConfig(k=2))
    assert np.allclose(model.map_latent(query), 0.2, atol=1e-12)


def test_ties_broken_by_store_order():
    # three equidistant stores but k=2: the first two in store order win
    query = np.zeros(32)
    store = store_of(
        (unit_input(0, 1.0), np.full(16, 1.0)),
        (unit_input(1, 1.0), np.full(16, 1.0)),
        (unit_input(2, 1.0), np.full(16, -1.0)),
    )
    model, _ = mapper.train(store, MapperConfig(k=2))
    assert np.allclose(model.map_latent(query), 1.0, atol=1e-12)


def test_training_point_fidelity():
    rng = np.random.default_rng(0)
    pairs = [
        (rng.uniform(-1, 1, 32), rng.uniform(-1, 1, 16)) for _ in range(12)
    ]
    store = store_of(*pairs)
    model, _ = mapper.train(store, MapperConfig())
    for inp, tgt in pairs:
        assert np.max(np.abs(model.map_latent(inp) - tgt)) <= 1e-9


def test_map_rejects_bad_query():
    store = store_of((np.zeros(32), np.zeros(16)))
    model, _ = mapper.train(store, MapperConfig())
    with pytest.raises(DimensionMismatch):
        model.map_latent(np.zeros(31))


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_idw_output_is_convex_in_targets(data):
    rng = np.random.default_rng(data.draw(st.integers(0, 2 ** 31)))
    n = data.draw(st.integers(1, 8))
    k = data.draw(st.integers(1, 8))
    pairs = [(rng.uniform(-1, 1, 32), rng.uniform(-1, 1, 16)) for _ in range(n)]
    store = store_of(*pairs)
    model, _ = mapper.train(store, MapperConfig(k=k))
    query = rng.uniform(-1, 1, 32)
    out = model.map_latent(query)
    targets = np.array([t for _, t in pairs])
    assert np.all(out >= targets.min(axis=0) - 1e-12)
    assert np.all(out <= targets.max(axis=0) + 1e-12)
    assert np.all(np.isfinite(out))
    assert np.all((out >= -1.0) & (out <= 1.0))


def test_mlp_fits_ten_examples():
    rng = np.random.default_rng(1)
    pairs = [(rng.uniform(-1, 1, 32), rng.uniform(-0.9, 0.9, 16)) for _ in range(10)]
    store = store_of(*pairs)
    model, loss = mapper.train(store, MapperConfig(variant="mlp", max_iters=2000))
    assert loss <= 1e-3
    out = model.map_latent(pairs[0][0])
    assert out.shape == (16,)
    assert np.all((out >= -1.0) & (out <= 1.0))


def test_mlp_training_is_seed_reproducible():
    rng = np.random.default_rng(2)
    pairs = [(rng.uniform(-1, 1, 32), rng.uniform(-0.9, 0.9, 16)) for _ in range(6)]
    store = store_of(*pairs)
    cfg = MapperConfig(variant="mlp", max_iters=300, seed=11)
    m1, l1 = mapper.train(store, cfg)
    m2, l2 = mapper.train(store, cfg)
    assert l1 == l2
    for a, b in zip(m1.weights + m1.biases, m2.weights + m2.biases):
        assert np.array_equal(a, b)


def test_mlp_outputs_always_bounded():
    rng = np.random.default_rng(3)
    store = store_of(*[(rng.uniform(-1, 1, 32), rng.uniform(-1, 1, 16)) for _ in range(5)])
    model, _ = mapper.train(store, MapperConfig(variant="mlp", max_iters=50))
    for _ in range(20):
        out = model.map_latent(rng.uniform(-1, 1, 32))
        assert np.all((out >= -1.0) & (out <= 1.0))


@pytest.mark.parametrize("variant", ["knn_idw", "mlp"])
def test_save_load_preserves_map_outputs(variant):
    rng = np.random.default_rng(4)
    store = store_of(*[(rng.uniform(-1, 1, 32), rng.uniform(-1, 1, 16)) for _ in range(8)])
    model, _ = mapper.train(store, MapperConfig(variant=variant, max_iters=100))
    restored = mapper.load_mapper(mapper.save_mapper(model))
    for _ in range(100):
        q = rng.uniform(-1, 1, 32)
        assert np.array_equal(model.map_latent(q), restored.map_latent(q))


def test_load_truncated_document():
    store = store_of((np.zeros(32), np.zeros(16)))
    model, _ = mapper.train(store, MapperConfig())
    data = mapper.save_mapper(model)
    with pytest.raises(MalformedDocument):
        mapper.load_mapper(data[: len(data) // 2])


def test_load_version_gate():
    with pytest.raises(UnsupportedVersion):
        mapper.load_mapper(b'{"format_version": 99, "variant": "knn_idw"}')


def test_jsonl_round_trip():
    rng = np.random.default_rng(5)
    store = store_of(*[(rng.uniform(-1, 1, 32), rng.uniform(-1, 1, 16)) for _ in range(4)])
    text = mapper.store_to_jsonl(store)
    back = mapper.store_from_jsonl(text)
    assert back == store


def test_jsonl_rejects_bad_line():
    with pytest.raises(MalformedDocument):
        mapper.store_from_jsonl('{"input": [0.1], "target": []}\n')
