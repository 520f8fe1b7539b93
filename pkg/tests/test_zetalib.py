import cmath
import math
import random

import mpmath
import pytest

from convexchains import zetalib as zl

mpmath.mp.dps = 30


def rel(a, b):
    return abs(a - b) / abs(b)


def sample_points(seed, count, box):
    rng = random.Random(seed)
    (s0, s1), (t0, t1) = box
    return [complex(rng.uniform(s0, s1), rng.uniform(t0, t1)) for _ in range(count)]


@pytest.mark.parametrize("s", sample_points(1, 40, ((-6.5, 6.5), (-40, 40))))
def test_gamma_against_mpmath(s):
    assert rel(zl.gamma_complex(s), complex(mpmath.gamma(s))) < 1e-11


def test_gamma_poles_and_reals():
    for k in range(0, 6):
        with pytest.raises(zl.PoleError):
            zl.gamma_complex(-k)
    for n in range(1, 15):
        assert rel(zl.gamma_complex(n).real, math.factorial(n - 1)) < 1e-13
    assert rel(zl.gamma_complex(0.5).real, math.sqrt(math.pi)) < 1e-14


@pytest.mark.parametrize("s", sample_points(2, 60, ((-3, 5), (-50, 50))))
def test_zeta_against_mpmath(s):
    assert rel(zl.zeta_complex(s), complex(mpmath.zeta(s))) < 1e-10


@pytest.mark.parametrize("s", [2, 3, 4, -1, -3, 0, 0.5, 1.5, -0.5 + 14j, 1 + 9.0647j, 1 + 1e-3j])
def test_zeta_special_points(s):
    assert rel(zl.zeta_complex(s), complex(mpmath.zeta(s))) < 1e-10


def test_zeta_pole():
    with pytest.raises(zl.PoleError):
        zl.zeta_complex(1)


def test_zeta_trivial_zeros():
    for k in range(1, 6):
        assert abs(zl.zeta_complex(-2 * k)) < 1e-12


@pytest.mark.parametrize("s", [-1, 2, 3, 0.5 + 10j, -0.5 + 20j, 2.5 - 7j])
def test_zeta_derivative_against_mpmath(s):
    assert rel(zl.zeta_derivative(s), complex(mpmath.zeta(s, derivative=1))) < 1e-8


def test_zeta_derivative_pole():
    with pytest.raises(zl.PoleError):
        zl.zeta_derivative(1)
    with pytest.raises(zl.PoleError):
        zl.zeta_derivative(1.01)


def test_constants_against_mpmath():
    c = zl.constants()
    kappa = float(mpmath.zeta(3) / mpmath.zeta(2))
    zp = float(mpmath.zeta(-1, derivative=1))
    assert abs(c.kappa - kappa) < 1e-12
    assert abs(c.zeta_prime_minus1 - zp) < 1e-10
    assert abs(c.C - (-2 * zp - math.log(2 * math.pi) / 6)) < 1e-10
    # Glaisher: zeta'(-1) = 1/12 - log A
    assert abs(c.zeta_prime_minus1 - (1 / 12 - math.log(float(mpmath.glaisher)))) < 1e-10


def test_hardy_z_is_real_zeta_on_critical_line():
    for t in (12.0, 17.3, 33.3, 48.0):
        z = cmath.exp(1j * zl.riemann_siegel_theta(t)) * zl.zeta_complex(0.5 + 1j * t)
        assert abs(z.imag) < 1e-9
        assert abs(z.real - zl.hardy_z(t)) < 1e-9


def test_zeros_against_mpmath():
    zs = zl.find_zeta_zeros(60)
    assert len(zs) == 13  # N(60) = 13
    for k, z in enumerate(zs, start=1):
        assert abs(z.gamma - float(mpmath.zetazero(k).imag)) < 1e-9
        assert rel(z.zeta_prime, complex(mpmath.zeta(z.rho, derivative=1))) < 1e-7
        assert abs(zl.zeta_complex(z.rho)) < 1e-10


def test_zero_counts_and_range():
    assert len(zl.find_zeta_zeros(14)) == 0
    assert len(zl.find_zeta_zeros(30)) == 3
    with pytest.raises(ValueError):
        zl.find_zeta_zeros(61)
    with pytest.raises(ValueError):
        zl.find_zeta_zeros(0)


def test_zero_cache_round_trip(tmp_path):
    path = tmp_path / "zeros.txt"
    zs = zl.find_zeta_zeros(40)
    zl.write_zero_cache(path, zs)
    back = zl.check_zero_cache(path)
    assert len(back) == len(zs)
    assert all(abs(a.gamma - b.gamma) < 1e-9 for a, b in zip(back, zs))


def test_zero_cache_rejects_tampering(tmp_path):
    path = tmp_path / "zeros.txt"
    zl.write_zero_cache(path, zl.find_zeta_zeros(30))
    lines = path.read_text().splitlines()
    lines[1] = "21.03 " + " ".join(lines[1].split()[1:])
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(ValueError):
        zl.check_zero_cache(path)
    path.write_text("21.0 1 0\n14.1 1 0\n")
    with pytest.raises(ValueError):
        zl.read_zero_cache(path)
