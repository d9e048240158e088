import pytest

from heckelab.exactlin import IntMatrix, charpoly
from heckelab.qexp import (
    HeckeMatrix,
    QExpansion,
    delta,
    delta_eta,
    dim_cusp,
    eisenstein,
    hecke_apply,
    hecke_matrices,
    hecke_matrix,
    miller_basis,
    newform_coefficients,
    sturm_bound,
)


# --- eisenstein ----------------------------------------------------------


def test_eisenstein_e4():
    assert eisenstein(4, 4).coeffs == (1, 240, 2160, 6720)
    assert eisenstein(4, 1).coeffs == (1,)


def test_eisenstein_e6():
    # sigma_5(2) = 33, so a_2 = -504 * 33 = -16632
    assert eisenstein(6, 3).coeffs == (1, -504, -16632)


def test_eisenstein_rejects_other_weights():
    with pytest.raises(ValueError):
        eisenstein(8, 5)
    with pytest.raises(ValueError):
        eisenstein(4, 0)


# --- delta ---------------------------------------------------------------


def test_delta_small():
    # frozen from the eta-product oracle q * prod(1-q^n)^24
    assert delta(3).coeffs == (0, 1, -24)
    assert delta(5).coeffs == (0, 1, -24, 252, -1472)


def test_delta_normalised_cusp_form():
    for prec in (2, 7, 30):
        f = delta(prec)
        assert f.coeffs[0] == 0
        assert f.coeffs[1] == 1
        assert f.weight == 12


def test_delta_matches_eta_product_oracle():
    assert delta(200).coeffs == delta_eta(200).coeffs


# --- dim_cusp / sturm ----------------------------------------------------


@pytest.mark.parametrize(
    "k,d", [(0, 0), (2, 0), (10, 0), (12, 1), (14, 0), (16, 1), (22, 1), (24, 2), (26, 1), (68, 5)]
)
def test_dim_cusp_values(k, d):
    assert dim_cusp(k) == d


def test_dim_cusp_cross_checked_by_basis_construction():
    for k in range(12, 80, 2):
        d = dim_cusp(k)
        basis = miller_basis(k, d + 1)
        assert basis.dim == d


def test_dim_cusp_rejects_odd():
    with pytest.raises(ValueError):
        dim_cusp(13)


def test_sturm_bound():
    assert sturm_bound(12) == 1
    assert sturm_bound(24) == 2
    assert sturm_bound(26) == 2
    with pytest.raises(ValueError):
        sturm_bound(10)


# --- miller basis --------------------------------------------------------


def test_miller_basis_weight_12_is_delta():
    basis = miller_basis(12, 10)
    assert basis.dim == 1
    assert basis.forms[0].coeffs == delta(10).coeffs


def test_miller_basis_weight_24_echelon():
    basis = miller_basis(24, 8)
    f1, f2 = basis.forms
    assert f1.coeffs[1] == 1 and f1.coeffs[2] == 0
    assert f2.coeffs[1] == 0 and f2.coeffs[2] == 1


def test_miller_basis_weight_10_empty():
    assert miller_basis(10, 3).forms == ()


def test_miller_triangular_through_weight_120():
    for k in range(12, 122, 2):
        d = dim_cusp(k)
        if d == 0:
            continue
        basis = miller_basis(k, d + 1)
        for i, f in enumerate(basis.forms, start=1):
            assert f.coeffs[0] == 0
            for j in range(1, d + 1):
                assert f.coeffs[j] == (1 if i == j else 0)


def test_miller_basis_truncation_consistency():
    big = miller_basis(24, 20)
    small = miller_basis(24, 6)
    for f, g in zip(big.forms, small.forms):
        assert f.coeffs[:6] == g.coeffs


def test_miller_basis_precision_guard():
    with pytest.raises(ValueError):
        miller_basis(24, 2)


# --- hecke_apply ---------------------------------------------------------


def test_hecke_t1_is_identity():
    f = delta(12)
    assert hecke_apply(f, 1).coeffs == f.coeffs


def test_hecke_t2_delta():
    tf = hecke_apply(delta(4), 2)
    assert tf.coeffs[1] == -24  # tau(2)


def test_hecke_multiplicativity_t2_t3_is_t6():
    f = delta(36)
    lhs = hecke_apply(hecke_apply(f, 3), 2)
    rhs = hecke_apply(f, 6)
    p = min(lhs.prec, rhs.prec)
    assert lhs.coeffs[:p] == rhs.coeffs[:p]


def test_hecke_apply_precision_error_reports_requirement():
    with pytest.raises(ValueError, match="needs input precision 10"):
        hecke_apply(delta(6), 2, out_prec=5)


def test_hecke_eigenvalue_recursion_on_delta():
    # a_{p^2} = a_p^2 - p^11 for the normalised weight-12 eigenform
    f = delta(50)
    for p in (2, 3, 5):
        assert f.coeffs[p * p] == f.coeffs[p] ** 2 - p**11 * f.coeffs[1]


# --- hecke_matrix --------------------------------------------------------


def test_hecke_matrix_weight_12():
    h = hecke_matrix(12, 2)
    assert h.mat == IntMatrix([[-24]])


def test_hecke_matrix_t1_identity():
    for k in (12, 24, 36):
        assert hecke_matrix(k, 1).mat == IntMatrix.identity(dim_cusp(k))


def test_hecke_matrix_weight_24_charpoly():
    # cross-checked against the modular-symbol square property (acceptance C3)
    h = hecke_matrix(24, 2)
    assert charpoly(h.mat).coeffs == (-20468736, -1080, 1)


def test_hecke_matrix_rejects_dimension_zero():
    with pytest.raises(ValueError):
        hecke_matrix(10, 2)


def test_hecke_commutativity():
    for k in (24, 36, 48, 60):
        mats = hecke_matrices(k, range(2, 8))
        for m in range(2, 8):
            for n in range(m + 1, 8):
                assert mats[m].mat @ mats[n].mat == mats[n].mat @ mats[m].mat


def test_hecke_recursion_t4():
    for k in (12, 24, 36, 48, 60):
        t2 = hecke_matrix(k, 2).mat
        t4 = hecke_matrix(k, 4).mat
        ident = IntMatrix.identity(dim_cusp(k))
        assert t4 == t2 @ t2 - 2 ** (k - 1) * ident


def test_hecke_multiplicative_matrix_identity():
    for k in (24, 38):
        t2 = hecke_matrix(k, 2).mat
        t3 = hecke_matrix(k, 3).mat
        t6 = hecke_matrix(k, 6).mat
        assert t6 == t2 @ t3


def test_hecke_matrices_shared_basis_agrees_with_single():
    hs = hecke_matrices(36, [2, 5])
    assert hs[2].mat == hecke_matrix(36, 2).mat
    assert hs[5].mat == hecke_matrix(36, 5).mat


def test_hecke_prime_power_recursion():
    # T_{p^2} = T_p T_p - p^{k-1} T_1 and T_8 = T_2 T_4 - 2^{k-1} T_2
    k = 24
    t2 = hecke_matrix(k, 2).mat
    t4 = hecke_matrix(k, 4).mat
    t8 = hecke_matrix(k, 8).mat
    assert t8 == t2 @ t4 - 2 ** (k - 1) * t2


# --- expansions as values ------------------------------------------------


def test_qexpansion_arithmetic_truncates_to_smaller_precision():
    e4a = eisenstein(4, 10)
    e4b = eisenstein(4, 6)
    assert (e4a + e4b).prec == 6
    prod = e4a * e4b
    assert prod.prec == 6
    assert prod.weight == 8


def test_qexpansion_rejects_mixed_weight_sum():
    with pytest.raises(ValueError):
        eisenstein(4, 5) + eisenstein(6, 5)


def test_qexpansion_json_roundtrip():
    f = delta(8)
    d = f.to_json_dict()
    assert d["coeffs"][2] == "-24"
    assert QExpansion.from_json_dict(d) == f


def test_hecke_matrix_json_roundtrip():
    h = hecke_matrix(24, 3)
    d = h.to_json_dict()
    assert d["dim"] == 2
    assert HeckeMatrix.from_json_dict(d).mat == h.mat


def test_newform_coefficients():
    an = newform_coefficients(12, 10)
    assert an[1] == 1 and an[2] == -24 and an[10] == -115920
    with pytest.raises(ValueError):
        newform_coefficients(24, 5)
