"""KS distance and effective sample size of resampled Beta(2,3) draws as the pool grows."""
from _common import execute, parser
from resir.config import RunConfig

if __name__ == "__main__":
    p = parser(__doc__, K=200)
    p.add_argument("--pool-sizes", default="2000,20000,100000")
    args = p.parse_args()
    sizes = tuple(int(s) for s in args.pool_sizes.split(","))
    cfg = RunConfig("convergence-check", K=args.K, seed=args.seed, target="beta(2,3)",
                    proposal="unif(0,1)", pool_sizes=sizes)
    execute(cfg, args.workers, args.output, ["N", "n", "scheme", "ks", "ess_fraction"])
