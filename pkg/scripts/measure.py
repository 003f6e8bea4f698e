"""Run a command and report wall time and peak RSS of the process tree's largest member.

    python scripts/measure.py -- threadmetrics report ...
"""
import resource
import subprocess
import sys
import time


def main(argv):
    if argv and argv[0] == "--":
        argv = argv[1:]
    t0 = time.perf_counter()
    code = subprocess.call(argv)
    wall = time.perf_counter() - t0
    peak_kib = resource.getrusage(resource.RUSAGE_CHILDREN).ru_maxrss
    print(f"exit={code} wall_s={wall:.1f} peak_rss_mib={peak_kib / 1024:.0f}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
