"""Ramp family: growth of the linear Poincare ratio for p < 1 and the
bounded bilinear alternative.  Writes CSV to stdout.

    python scripts/failure_vs_bilinear.py --p 0.5,0.75,0.9
"""
import argparse

from ccpoincare.poincare import bilinear_ramp_scan, linear_failure_demo


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", default="0.5,0.75,0.9")
    args = ap.parse_args()

    print("case,eps,ratio,slope,expected_slope")
    for p in map(float, args.p.split(",")):
        rep = linear_failure_demo(p)
        for e, r in zip(rep.eps, rep.ratio):
            print(f"linear p={p},{e:.6g},{r:.6g},{rep.slope:.4f},{rep.expected_slope:.4f}")
    scan = bilinear_ramp_scan()
    for e, r in zip(scan.eps, scan.ratios):
        print(f"bilinear,{e:.6g},{r:.6g},,")
    print(f"# bilinear spread (max/min) = {scan.spread:.4g}")


if __name__ == "__main__":
    main()
