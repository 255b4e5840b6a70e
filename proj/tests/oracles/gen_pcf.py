#!/usr/bin/env python3
"""Reference values of D_nu(z) at 40 digits via mpmath.pcfd.

Output is a C++ initializer list pasted into tests/pcf_oracle_values.inc.
"""
import mpmath as mp

mp.mp.dps = 40

POINTS = [
    (-0.3, -4.0), (-0.3, 0.0), (-0.3, 2.5),
    (-0.5, -1.0), (-0.5, 3.0),
    (-1.0, -5.0), (-1.0, 0.0), (-1.0, 5.0),
    (-1.5, -3.0), (-1.5, 1.0),
    (-2.0, 0.0), (-2.0, -6.0), (-2.0, 4.0),
    (-2.5, 1.3), (-2.5, -2.0), (-2.5, 6.0),
    (-3.0, -8.0), (-3.0, 0.7),
    (-3.5, -4.5), (-3.5, 2.2),
    (-4.0, 10.0), (-5.0, -10.0), (-5.0, 0.0),
    (-7.25, -3.0), (-7.25, 4.0), (-12.0, -12.0), (-12.0, 3.0),
]

for nu, z in POINTS:
    v = mp.pcfd(nu, z)
    print(f"    {{{nu!r}, {z!r}, {mp.nstr(v, 20, min_fixed=-1, max_fixed=-1)}}},")
