"""Overall MSE of the three schemes for the 4-d Kotz target under a normal proposal."""
from _common import execute, parser
from resir.config import RunConfig

if __name__ == "__main__":
    args = parser(__doc__, K=1000).parse_args()
    cfg = RunConfig("bench-kotz", K=args.K, seed=args.seed)
    execute(cfg, args.workers, args.output,
            ["scheme", "mse_1", "mse_2", "mse_3", "mse_4", "omse"])
