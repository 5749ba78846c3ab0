"""Independent high-precision oracle for the frozen constants used in the C++ tests.

Run: python3 tests/oracles/derive_values.py
"""
from fractions import Fraction

import mpmath as mp

mp.mp.dps = 50


def lmsr_cost(q_yes, q_no, b=1):
    return b * mp.log(mp.e ** (q_yes / b) + mp.e ** (q_no / b))


def price(q_yes, q_no, b=1):
    a, c = mp.e ** (q_yes / b), mp.e ** (q_no / b)
    return a / (a + c)


def sigmoid(z):
    return 1 / (1 + mp.e ** (-z))


def macro(tp, fn, tn, fp):
    # brute force: expand confusion counts into explicit (pred, actual) pairs
    pairs = [("R", "R")] * tp + [("N", "R")] * fn + [("N", "N")] * tn + [("R", "N")] * fp
    out = {}
    for cls in ("R", "N"):
        pred = sum(1 for p, a in pairs if p == cls)
        act = sum(1 for p, a in pairs if a == cls)
        hit = sum(1 for p, a in pairs if p == cls and a == cls)
        prec = Fraction(hit, pred) if pred else Fraction(0)
        rec = Fraction(hit, act) if act else Fraction(0)
        f1 = 2 * prec * rec / (prec + rec) if prec + rec else Fraction(0)
        out[cls] = (prec, rec, f1)
    acc = Fraction(sum(1 for p, a in pairs if p == a), len(pairs))
    mean = lambda i: (out["R"][i] + out["N"][i]) / 2
    return acc, mean(0), mean(1), mean(2)


print("price(1,0)            =", mp.nstr(price(1, 0), 20))
print("cost buy 1 yes at 0   =", mp.nstr(lmsr_cost(1, 0) - lmsr_cost(0, 0), 20))
print("C(1,1)-C(0,0)         =", mp.nstr(lmsr_cost(1, 1) - lmsr_cost(0, 0), 20))
print("logit(0.7311)         =", mp.nstr(mp.log(mp.mpf("0.7311") / (1 - mp.mpf("0.7311"))), 20))
for k in range(1, 8):
    print(f"after {k} unit yes: price", mp.nstr(price(k, 0), 20), "cum cost", mp.nstr(lmsr_cost(k, 0) - lmsr_cost(0, 0), 20))
print("sigmoid(50*0.09)      =", mp.nstr(sigmoid(50 * mp.mpf("0.09")), 20))
print("g((.6,.6);c=.5,r=.3)  =", mp.nstr(mp.mpf("0.09") - 2 * mp.mpf("0.01"), 20))
acc, p, r, f = macro(3, 1, 4, 0)
print("acc/prec/rec/f1       =", float(acc), float(p), float(r), mp.nstr(mp.mpf(f.numerator) / f.denominator, 20))
print("coverage 68/192       =", 68 / 192)
