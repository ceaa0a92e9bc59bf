"""Random linear codes and the additive masking encoder."""

import itertools

import numpy as np
import pytest

from icc_kit.codes import (
    LinearCode,
    SecretKey,
    encode,
    key_gen,
    sample_code,
    shift,
    subcolumns_full_rank,
)
from icc_kit.gf import FieldMatrix, FieldVector


def test_sample_code_deterministic_under_seed():
    a = sample_code(5, 3, 2, 2024)
    b = sample_code(5, 3, 2, 2024)
    assert a == b
    assert a != sample_code(5, 3, 2, 2025)


def test_sample_code_shape_and_alphabet():
    code = sample_code(4, 2, 2, 9)
    assert (code.n, code.m, code.q) == (4, 2, 2)
    for row in code.generator.entries:
        assert all(v in (0, 1) for v in row)


def test_sample_code_rejects_bad_dimensions():
    with pytest.raises(ValueError):
        sample_code(3, 4, 2, 0)
    with pytest.raises(ValueError):
        sample_code(3, 0, 2, 0)


def test_generator_entry_frequencies_near_uniform():
    # aggregate symbol counts over 10^4 sampled generators, 3 sigma band
    q, n, m = 3, 4, 2
    seeds = np.random.default_rng(555).integers(0, 2**63, size=10_000)
    counts = np.zeros(q, dtype=np.int64)
    for seed in seeds:
        code = sample_code(n, m, q, int(seed))
        for row in code.generator.entries:
            for v in row:
                counts[v] += 1
    total = counts.sum()
    expected = total / q
    sigma = (total * (1 / q) * (1 - 1 / q)) ** 0.5
    assert np.all(np.abs(counts - expected) <= 3 * sigma)


def test_key_gen_alphabet_and_determinism():
    k = key_gen(1, 2, 77)
    assert k.vector.values[0] in (0, 1)
    assert key_gen(4, 5, 31) == key_gen(4, 5, 31)


def test_key_gen_chi_square_uniformity():
    # m=2, q=3: 9 cells, 8 degrees of freedom, alpha = 0.01 cutoff 20.09
    seeds = np.random.default_rng(808).integers(0, 2**63, size=10_000)
    counts = np.zeros(9, dtype=np.int64)
    for seed in seeds:
        key = key_gen(2, 3, int(seed)).vector.values
        counts[key[0] * 3 + key[1]] += 1
    expected = len(seeds) / 9
    chi2 = float(((counts - expected) ** 2 / expected).sum())
    assert chi2 < 20.09


G23 = LinearCode(FieldMatrix(((1, 1, 0), (0, 1, 1)), 2))


def test_encode_zero_key_is_identity():
    x = FieldVector((1, 0, 1), 2)
    assert encode(x, SecretKey(FieldVector((0, 0), 2)), G23) == x


def test_encode_hand_value():
    x = FieldVector((0, 0, 0), 2)
    k = SecretKey(FieldVector((1, 1), 2))
    assert encode(x, k, G23) == FieldVector((1, 0, 1), 2)


def test_shift_zero_is_identity():
    y = FieldVector((1, 1, 0), 2)
    assert shift(y, FieldVector((0, 0), 2), G23) == y


def test_shift_hand_value_ternary():
    code = LinearCode(FieldMatrix(((1, 2, 0), (0, 1, 2)), 3))
    # tG = (1,1,1) for t = (1,2), so (2,2,2) shifts to (1,1,1)
    assert shift(FieldVector((2, 2, 2), 3), FieldVector((1, 2), 3), code) == FieldVector((1, 1, 1), 3)


@pytest.mark.parametrize("q,n,m", [(2, 3, 2), (2, 4, 2), (3, 2, 2), (5, 2, 1)])
def test_encode_shift_inverse_exhaustive(q, n, m):
    code = sample_code(n, m, q, 1000 + q)
    for x in itertools.product(range(q), repeat=n):
        xv = FieldVector(x, q)
        for k in itertools.product(range(q), repeat=m):
            kv = FieldVector(k, q)
            masked = encode(xv, SecretKey(kv), code)
            assert shift(masked, kv, code) == xv


def test_encode_dimension_mismatch():
    with pytest.raises(ValueError):
        encode(FieldVector((1, 0), 2), SecretKey(FieldVector((1, 1), 2)), G23)


def test_subcolumns_identity_pivots():
    code = LinearCode(FieldMatrix(((1, 0, 0), (0, 1, 0)), 2))
    assert subcolumns_full_rank(code, (0, 1))
    assert subcolumns_full_rank(code, (0,))


def test_subcolumns_zero_column():
    code = LinearCode(FieldMatrix(((1, 0), (1, 0)), 2))
    assert not subcolumns_full_rank(code, (1,))


def test_subcolumns_rejects_oversized_or_repeated_subsets():
    with pytest.raises(ValueError):
        subcolumns_full_rank(G23, (0, 1, 2))
    with pytest.raises(ValueError):
        subcolumns_full_rank(G23, (1, 1))


def test_subcolumns_match_image_enumeration_oracle():
    rng = np.random.default_rng(4242)
    for _ in range(150):
        q = int(rng.choice([2, 3]))
        n = int(rng.integers(2, 6))
        m = int(rng.integers(1, min(n, 3) + 1))
        code = sample_code(n, m, q, int(rng.integers(2**31)))
        r = int(rng.integers(1, m + 1))
        subset = tuple(sorted(rng.choice(n, size=r, replace=False).tolist()))
        image = set()
        for k in itertools.product(range(q), repeat=m):
            image.add(
                tuple(
                    sum(k[i] * code.generator.entries[i][j] for i in range(m)) % q
                    for j in subset
                )
            )
        assert subcolumns_full_rank(code, subset) == (len(image) == q ** r)


def test_linear_code_requires_wide_generator():
    with pytest.raises(ValueError):
        LinearCode(FieldMatrix(((1, 0), (0, 1), (1, 1)), 2))  # m > n


def test_code_json_round_trip():
    code = sample_code(4, 2, 3, 63)
    blob = code.to_json()
    assert blob["n"] == 4 and blob["m"] == 2 and blob["q"] == 3
    assert LinearCode.from_json(blob) == code


def test_code_json_dimension_cross_check():
    blob = sample_code(4, 2, 3, 63).to_json()
    blob["m"] = 3
    with pytest.raises(ValueError):
        LinearCode.from_json(blob)
