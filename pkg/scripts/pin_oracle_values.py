"""Regenerate the high-precision oracle values pinned in the test suite.

Every closed-form quantity the library computes (gain margin, error norms,
coordinate transforms, arrival deadlines, envelope gains, admissible-gain
floors) is recomputed here with mpmath at 50 digits, through an independent
route where one exists (the gain margin also as the largest eigenvalue of
its quadratic-form matrix). Run and paste the printed literals into the
tests when the pinned grids change.

    python3 scripts/pin_oracle_values.py
"""

import mpmath as mp

mp.mp.dps = 50


def gain_margin_closed(s):
    return 1 + s ** 2 / 2 + s * mp.sqrt(1 + s ** 2 / 4)


def gain_margin_eig(s):
    # largest eigenvalue of [[1+s^2, s], [s, 1]]; det = 1
    tr = 2 + s ** 2
    disc = mp.sqrt(tr ** 2 - 4)
    return (tr + disc) / 2


def wrap(a):
    two_pi = 2 * mp.pi
    return mp.fmod(mp.fmod(a + mp.pi, two_pi) + two_pi, two_pi) - mp.pi


def cart_to_polar(x, y, theta):
    rho = mp.sqrt(x * x + y * y)
    los = mp.atan2(y, x)
    delta = mp.fmod(mp.fmod(los, 2 * mp.pi) + 2 * mp.pi, 2 * mp.pi) - mp.pi
    gamma = mp.fmod(mp.fmod(los - theta, 2 * mp.pi) + 2 * mp.pi, 2 * mp.pi) - mp.pi
    return rho, delta, gamma


def fmt(x):
    return mp.nstr(x, 20)


def main():
    print("# gain margin M(s), closed form vs eigenvalue route")
    for s in ("0", "0.5", "1", "1.01", "1.2", "2", "5", "15"):
        s = mp.mpf(s)
        a, b = gain_margin_closed(s), gain_margin_eig(s)
        assert mp.almosteq(a, b, rel_eps=mp.mpf("1e-45")), (s, a, b)
        print(f"    ({fmt(s)}, {fmt(a)}),")

    print("# M(s)^2 = lambda_max / lambda_min (det P = 1)")
    for s in ("0.5", "1.2", "5"):
        s = mp.mpf(s)
        lam_max = gain_margin_eig(s)
        assert mp.almosteq(gain_margin_closed(s) ** 2, lam_max / (1 / lam_max),
                           rel_eps=mp.mpf("1e-45"))
    print("    # verified on the pinned grid")

    print("# cart_to_polar pins: (x, y, theta) -> (rho, delta, gamma)")
    poses = [("1", "1", "0.5"), ("-2", "0.25", "-3"), ("0.3", "-0.7", "2.9"),
             ("-1", "-1", "0")]
    for x, y, th in poses:
        rho, d, g = cart_to_polar(mp.mpf(x), mp.mpf(y), mp.mpf(th))
        print(f"    (({x}, {y}, {th}), ({fmt(rho)}, {fmt(d)}, {fmt(g)})),")

    print("# error norms at (delta, gamma) = (0.8, -0.6)")
    d, g = mp.mpf("0.8"), mp.mpf("-0.6")
    print("    euclid:", fmt(mp.sqrt(d ** 2 + mp.tan(g) ** 2)))
    print("    half4: ", fmt(mp.sqrt(4 * mp.tan(d / 2) ** 2 + mp.tan(g) ** 2)))
    print("    half1: ", fmt(mp.sqrt(mp.tan(d / 2) ** 2 + mp.tan(g) ** 2)))

    print("# steering envelope gain sqrt(2) (1 + max(c1 c2, c1 + c2)) M(c1)")
    for c1, c2 in (("1.01", "5"), ("1.5", "2"), ("0.5", "0.5")):
        c1, c2 = mp.mpf(c1), mp.mpf(c2)
        val = mp.sqrt(2) * (1 + max(c1 * c2, c1 + c2)) * gain_margin_closed(c1)
        print(f"    (({fmt(c1)}, {fmt(c2)}), {fmt(val)}),")

    print("# arrival deadline (rho0/v) sqrt(1 + M^2 B0^2), fig1 starts")
    c1, v, rho0 = mp.mpf("1.01"), mp.mpf("0.5"), mp.mpf(1)
    m = gain_margin_closed(c1)
    for d0, g0 in ((mp.mpf(0), -mp.pi / mp.mpf("2.5")),
                   (-mp.pi / 2, -mp.pi / mp.mpf("2.5")),
                   (mp.pi, mp.mpf(0))):
        b0 = mp.sqrt(d0 ** 2 + mp.tan(g0) ** 2)
        t1 = rho0 / v * mp.sqrt(1 + m ** 2 * b0 ** 2)
        print(f"    (({fmt(d0)}, {fmt(g0)}), {fmt(t1)}),")

    print("# decel deadline (n+1)(rho0^(1/(n+1))/c0) sqrt(1 + M^2 B0^2)")
    c0, c1, n = mp.mpf("0.5"), mp.mpf("1.2"), 2
    m = gain_margin_closed(c1)
    b0 = mp.sqrt(mp.tan(mp.pi / mp.mpf("2.5")) ** 2)
    t1 = (n + 1) * (rho0 ** (mp.mpf(1) / (n + 1)) / c0) * mp.sqrt(1 + m ** 2 * b0 ** 2)
    print("    fig4 red:", fmt(t1))

    print("# curbsafe c1 floor max(0, -rho0 tan(g0)/sin(d0)), fig5 starts")
    for d0, g0 in ((mp.pi / 6, -mp.pi / 4),
                   (mp.pi / 2, -mp.pi / mp.mpf("2.5")),
                   (5 * mp.pi / 6, mp.pi / 4)):
        floor = max(mp.mpf(0), -rho0 * mp.tan(g0) / mp.sin(d0))
        print(f"    (({fmt(d0)}, {fmt(g0)}), {fmt(floor)}),")

    print("# straight-line run: delta0=0, gamma0=0, rho(t) = rho0 - v t exactly")
    print("    # integrates to machine precision, pinned structurally in tests")


if __name__ == "__main__":
    main()
