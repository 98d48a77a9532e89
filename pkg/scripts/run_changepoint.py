"""Posterior summaries of the coal-disaster change-point model under both prior cases."""
from _common import execute, parser
from resir.config import RunConfig

if __name__ == "__main__":
    args = parser(__doc__, K=1000).parse_args()
    cfg = RunConfig("changepoint", K=args.K, seed=args.seed)
    execute(cfg, args.workers, args.output,
            ["case", "scheme", "theta_mean", "theta_sd", "lambda1_mean", "lambda1_sd",
             "lambda2_mean", "lambda2_sd", "theta_mode"])
