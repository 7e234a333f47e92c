"""Backend parity: the compiled kernels must be bit-identical to pure Python."""

import random
from array import array

import pytest

from motifkit._kernels import available_backends

BACKENDS = available_backends()

needs_both = pytest.mark.skipif(
    "cy" not in BACKENDS, reason="compiled kernels unavailable"
)


def random_scan_case(rng):
    n = rng.randint(0, 200)
    vocab_size = rng.randint(1, 8)
    token_ids = array("i", [rng.randint(-1, vocab_size - 1) for _ in range(n)])
    clitic = array("B", [rng.random() < 0.1 for _ in range(n)])
    pat_offsets = array("i", [0])
    pos_offsets = array("i", [0])
    alt_ids = array("i")
    for _ in range(rng.randint(1, 4)):
        length = rng.randint(1, 3)
        for _ in range(length):
            for _ in range(rng.randint(1, 2)):
                alt_ids.append(rng.randint(0, vocab_size - 1))
            pos_offsets.append(len(alt_ids))
        pat_offsets.append(len(pos_offsets) - 1)
    return token_ids, pat_offsets, pos_offsets, alt_ids, clitic, rng.random() < 0.5


@needs_both
def test_scan_parity():
    rng = random.Random(2024)
    py, cy = BACKENDS["py"], BACKENDS["cy"]
    for _ in range(300):
        case = random_scan_case(rng)
        assert py.scan(*case) == cy.scan(*case)


@needs_both
def test_svm_train_parity_is_bit_exact():
    rng = random.Random(7)
    py, cy = BACKENDS["py"], BACKENDS["cy"]
    for _ in range(20):
        n = rng.randint(1, 40)
        dim = rng.randint(1, 6)
        epochs = rng.randint(1, 8)
        x = array("d", [rng.random() for _ in range(n * dim)])
        y = array("i", [rng.randint(0, 3) for _ in range(n)])
        s = array("d", [rng.choice([1.0, 0.5, 2.0]) for _ in range(n)])
        orders = array("i")
        for _ in range(epochs):
            idx = list(range(n))
            rng.shuffle(idx)
            orders.extend(idx)
        lam = rng.choice([0.01, 0.1, 1.0])
        w1, b1 = py.svm_train(x, y, s, n, dim, 4, orders, epochs, lam)
        w2, b2 = cy.svm_train(x, y, s, n, dim, 4, orders, epochs, lam)
        assert list(w1) == list(w2)
        assert list(b1) == list(b2)


def test_selected_backend_exports():
    import motifkit._kernels as kernels

    assert kernels.BACKEND in ("py", "cy")
    assert callable(kernels.scan)
    assert callable(kernels.svm_train)
