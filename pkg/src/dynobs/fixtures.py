"""Bundled demonstration models and formulas.

fig2: two-state model with a blind and a perfect observation.
fig1: seven-state security model with two clearance levels.
fig4: fig1 with the second observation coarsened so the secret stays safe.
diag: six-state two-line plant monitored by a line sensor and a phase
      sensor; the phase sensor can fail at runtime.
"""

from __future__ import annotations

from .model import Model, parse_model

FIG2 = """\
# Two states, q holds only on s1.  o1 is blind, o2 is perfect.
observations: o1 o2 ;
atoms: q ;
states: s1 s2 ;
init: s1 ;
initobs: o1 ;
label s1 : q ;
trans: s1 -> s1  s1 -> s2  s2 -> s1 ;
obs o1 : { s1 s2 } ;
obs o2 : ;
"""

FIG2_FORMULA = "D[o2](K q | D[o1] K A X q)"

FIG1 = """\
# Security scenario: p is the secret, o1/o2 are clearance levels.
observations: o1 o2 ;
atoms: p ;
states: s0 s1 s2 s3 s4 s5 s6 ;
init: s0 ;
initobs: o1 ;
label s5 : p ;
trans: s0 -> s1  s0 -> s2  s0 -> s3
       s1 -> s4  s2 -> s5  s3 -> s6
       s4 -> s4  s5 -> s5  s6 -> s6 ;
obs o1 : { s1 s2 } { s4 s5 s6 } ;
obs o2 : { s2 s3 } { s5 s6 } ;
"""

FIG1_SAFE = "(D[o1] A G !K p) & (D[o2] A G !K p)"
FIG1_LEAK = "D[o1] E F D[o2] K p"

FIG4 = """\
# Like fig1, but o2 can no longer separate s4 from s5.
observations: o1 o2 ;
atoms: p ;
states: s0 s1 s2 s3 s4 s5 s6 ;
init: s0 ;
initobs: o1 ;
label s5 : p ;
trans: s0 -> s1  s0 -> s2  s0 -> s3
       s1 -> s4  s2 -> s5  s3 -> s6
       s4 -> s4  s5 -> s5  s6 -> s6 ;
obs o1 : { s1 s2 } { s4 s5 s6 } ;
obs o2 : { s2 s3 } { s4 s5 s6 } ;
"""

FIG4_LEAK = "E F D[o2] K p"

DIAG = """\
# Two-line plant.  Class atoms c1/c2 partition the states; p2 marks that
# the phase sensor has failed.  o_sc uses both sensors, o_1 lost the line
# sensor, o_2 lost the phase sensor.
observations: o_sc o_1 o_2 ;
atoms: c1 c2 p2 ;
states: s0 a1 a2 b1 b2 bx ;
init: s0 ;
initobs: o_sc ;
label s0 : c1 ;
label a1 : c1 ;
label a2 : c1 p2 ;
label b1 : c2 ;
label b2 : c2 p2 ;
label bx : c2 p2 ;
trans: s0 -> a1  s0 -> b1
       a1 -> a1  a1 -> a2
       b1 -> b1  b1 -> b2
       a2 -> a2  b2 -> bx  bx -> bx ;
obs o_sc : { b2 bx } ;
obs o_1 : { a1 b1 } { a2 b2 bx } ;
obs o_2 : { a1 a2 } { b1 b2 bx } ;
"""

DIAG_FULL = "D[o_sc] A G ((K c1 | K c2) & (p2 -> D[o_2] A G (K c1 | K c2)))"
DIAG_NO_LINE_SENSOR = "D[o_1] A G ((K c1 | K c2) & (p2 -> D[o_2] A G (K c1 | K c2)))"

FILES = {
    "fig1": {"fig1.km": FIG1, "fig1_safe.phi": FIG1_SAFE + "\n", "fig1_leak.phi": FIG1_LEAK + "\n"},
    "fig2": {"fig2.km": FIG2, "fig2.phi": FIG2_FORMULA + "\n"},
    "fig4": {"fig4.km": FIG4, "fig4_leak.phi": FIG4_LEAK + "\n"},
    "diag": {
        "diag.km": DIAG,
        "diag_full.phi": DIAG_FULL + "\n",
        "diag_nosensor.phi": DIAG_NO_LINE_SENSOR + "\n",
    },
}


def fig1() -> Model:
    return parse_model(FIG1)


def fig2() -> Model:
    return parse_model(FIG2)


def fig4() -> Model:
    return parse_model(FIG4)


def diag() -> Model:
    return parse_model(DIAG)
