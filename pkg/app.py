"""
深度稀疏字典分解实验工具 - 主程序
提供命令行接口：生成模型实例、运行前向/后向分解、SNR 扫描、假设审计和分析类实验

退出码：0 成功，1 计算中止，2 用法、配置或输入文件错误
"""
import functools
import logging
import os
import sys
from typing import Any, Callable, Dict, Optional

import click
from dotenv import load_dotenv

from analysis.complexity import complexity_expressions
from analysis.coupon import (conjectured_lower_bound, coupon_collector_trials,
                             harmonic_expectation)
from analysis.rip import rip_constant_estimate
from core.errors import (ConfigError, DeepDictError, FactorizationAbort,
                         MatrixFormatError, ParameterError)
from core.linalg import column_normalize
from deepfact.audit import audit_assumptions_backward, audit_assumptions_forward
from genmodel.rng import stream
from genmodel.sampling import sample_sparse_dictionary
from genmodel.synthesis import synthesize
from services.config_service import ExperimentConfig, load_config, with_overrides
from services.experiment_service import (CURVE_COLUMNS, SWEEP_COLUMNS, make_inits,
                                         recovery_curves, run_factorization,
                                         snr_sweep, summarize_errors, sweep_summary)
from storage.local_storage import LocalStorage
from storage.matrix_codec import decode_matrix
from storage.run_store import load_instance, save_factorization, save_instance

# 加载环境变量
load_dotenv()

logger = logging.getLogger(__name__)

EXIT_ABORT = 1
EXIT_USAGE = 2


def exit_on_error(func: Callable) -> Callable:
    """把库代码抛出的异常映射为退出码"""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (ConfigError, ParameterError, MatrixFormatError, FileNotFoundError) as e:
            logger.error(f"参数或输入错误: {e}")
            click.echo(f"错误: {e}", err=True)
            sys.exit(EXIT_USAGE)
        except DeepDictError as e:
            logger.error(f"计算中止: {e}")
            click.echo(f"计算中止: {e}", err=True)
            sys.exit(EXIT_ABORT)
    return wrapper


def _config(ctx: click.Context) -> ExperimentConfig:
    return ctx.obj["config"]


def _storage(path: str) -> LocalStorage:
    storage = LocalStorage(path)
    storage.cleanup_stale()
    return storage


def _instance_dir(cfg: ExperimentConfig, explicit: Optional[str]) -> str:
    path = explicit or cfg.instance_dir or os.path.join(cfg.out_dir, "instance")
    if not os.path.isdir(path):
        raise FileNotFoundError(f"模型实例目录不存在: {path}")
    return path


@click.group()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
              help="KEY=value 格式的实验配置文件")
@click.option("--seed", type=int, default=None, help="生成实例与单次运行的种子")
@click.option("--threads", type=int, default=None, help="并行线程数，默认取可用核数")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None, help="输出目录")
@click.option("--mode", type=click.Choice(["forward", "backward", "both"]), default=None,
              help="分解模式")
@click.option("--paper-scale", is_flag=True, default=False, help="使用完整规模的模型（耗时很长）")
@click.option("--verbose", "-v", is_flag=True, default=False, help="输出 DEBUG 日志")
@click.pass_context
def cli(ctx: click.Context, config_path: Optional[str], seed: Optional[int], threads: Optional[int],
        out_dir: Optional[str], mode: Optional[str], paper_scale: bool, verbose: bool) -> None:
    """深度稀疏字典分解实验工具"""
    overrides: Dict[str, Any] = {"seed": seed, "threads": threads, "out_dir": out_dir, "mode": mode}
    try:
        cfg = load_config(config_path, overrides, paper_scale=paper_scale)
    except (ConfigError, ParameterError) as e:
        click.echo(f"配置错误: {e}", err=True)
        sys.exit(EXIT_USAGE)
    level = logging.DEBUG if verbose else getattr(logging, cfg.log_level, logging.INFO)
    logging.basicConfig(level=level,
                        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    logging.getLogger().setLevel(level)
    ctx.ensure_object(dict)
    ctx.obj["config"] = cfg


@cli.command()
@click.pass_context
@exit_on_error
def generate(ctx: click.Context) -> None:
    """采样一个深度模型实例并写入 <out>/instance"""
    cfg = _config(ctx)
    instance = synthesize(cfg.model_spec(), cfg.n_samples, cfg.seed)
    path = cfg.instance_dir or os.path.join(cfg.out_dir, "instance")
    manifest = save_instance(_storage(path), instance)
    click.echo(f"模型实例已写入 {path}")
    for name, shape in manifest["matrices"].items():
        click.echo(f"  {name}: {shape[0]}x{shape[1]}")


@cli.command()
@click.option("--instance", "instance_path", default=None, help="模型实例目录")
@click.pass_context
@exit_on_error
def factorize(ctx: click.Context, instance_path: Optional[str]) -> None:
    """在已生成的实例上运行前向和/或后向分解"""
    cfg = _config(ctx)
    instance = load_instance(_instance_dir(cfg, instance_path))
    for mode in cfg.modes():
        storage = _storage(os.path.join(cfg.out_dir, mode))
        try:
            report = run_factorization(instance, mode, cfg.altmin_config(), cfg.alpha, cfg.seed,
                                       cfg.sigma_convention)
        except FactorizationAbort as e:
            save_factorization(storage, e.partial_report)
            click.echo(f"{mode} 分解中止，部分报告已写入 {storage.storage_path}", err=True)
            raise
        save_factorization(storage, report)
        click.echo(summarize_errors(report))


@cli.command("snr-sweep")
@click.option("--instance", "instance_path", default=None, help="模型实例目录")
@click.pass_context
@exit_on_error
def snr_sweep_command(ctx: click.Context, instance_path: Optional[str]) -> None:
    """在 SNR 网格上比较两种算法，写出 snr_sweep.csv"""
    cfg = _config(ctx)
    instance = load_instance(_instance_dir(cfg, instance_path))
    rows = snr_sweep(instance, cfg.altmin_config(T=cfg.sweep_T), cfg.snr_grid, cfg.seeds,
                     cfg.modes(), cfg.sigma_convention)
    storage = _storage(cfg.out_dir)
    path = storage.save_csv("snr_sweep.csv", SWEEP_COLUMNS, rows)
    for (algo, stage, snr), err in sorted(sweep_summary(rows).items()):
        click.echo(f"{algo:8s} {stage:10s} SNR={snr:5.1f} dB  平均误差 {err:.3e}")
    click.echo(f"已写入 {path}（{len(rows)} 行）")


@cli.command("experiment-recovery")
@click.pass_context
@exit_on_error
def experiment_recovery(ctx: click.Context) -> None:
    """端到端恢复实验：生成实例，对每个种子运行分解，写出逐次迭代误差曲线"""
    cfg = _config(ctx)
    instance = synthesize(cfg.model_spec(), cfg.n_samples, cfg.seed)
    save_instance(_storage(os.path.join(cfg.out_dir, "instance")), instance)
    reports = []
    for mode in cfg.modes():
        for seed in cfg.seeds:
            report = run_factorization(instance, mode, cfg.altmin_config(), cfg.alpha, seed,
                                       cfg.sigma_convention)
            save_factorization(_storage(os.path.join(cfg.out_dir, mode, f"seed_{seed}")), report)
            reports.append(report)
            click.echo(f"seed={seed} " + summarize_errors(report))
    path = _storage(cfg.out_dir).save_csv("recovery.csv", CURVE_COLUMNS, recovery_curves(reports))
    click.echo(f"恢复曲线已写入 {path}")


@cli.command()
@click.option("--instance", "instance_path", default=None, help="模型实例目录")
@click.option("--with-inits/--no-inits", default=True, help="是否同时审计初始化半径")
@click.pass_context
@exit_on_error
def audit(ctx: click.Context, instance_path: Optional[str], with_inits: bool) -> None:
    """审计实例相对收敛定理假设的满足情况，写出 audit_<mode>.json"""
    cfg = _config(ctx)
    instance = load_instance(_instance_dir(cfg, instance_path))
    storage = _storage(cfg.out_dir)
    for mode in cfg.modes():
        inits = make_inits(instance, mode, cfg.alpha, cfg.seed)[0] if with_inits else None
        if mode == "forward":
            report = audit_assumptions_forward(instance, inits=inits, delta=cfg.delta,
                                               rip_trials=cfg.trials, seed=cfg.seed)
        else:
            report = audit_assumptions_backward(instance, inits=inits, delta=cfg.delta,
                                                rip_trials=cfg.trials, seed=cfg.seed,
                                                sigma_convention=cfg.sigma_convention)
        document = report.to_dict()
        document["complexity"] = [row.to_dict() for row in
                                  complexity_expressions(instance.spec, cfg.delta, n=instance.n)]
        storage.save_json(f"audit_{mode}.json", document)
        failed = report.failed()
        click.echo(f"[{mode}] {len(report.records)} 项假设，未满足 {len(failed)} 项"
                   + (f": {', '.join(failed)}" if failed else ""))


@cli.command()
@click.option("--matrix", "matrix_path", default=None, help="DS2PMAT1 矩阵文件；缺省时采样稀疏字典")
@click.option("--order", type=int, default=None, help="RIP 阶数 s")
@click.option("--trials", type=int, default=None, help="采样支撑集个数")
@click.option("--normalize/--raw", default=True, help="估计前是否列归一化")
@click.pass_context
@exit_on_error
def rip(ctx: click.Context, matrix_path: Optional[str], order: Optional[int],
        trials: Optional[int], normalize: bool) -> None:
    """估计矩阵的 RIP 常数，写出 rip.json"""
    cfg = with_overrides(_config(ctx), matrix_path=matrix_path, rip_order=order, trials=trials)
    if cfg.matrix_path is not None:
        if not os.path.isfile(cfg.matrix_path):
            raise FileNotFoundError(f"矩阵文件不存在: {cfg.matrix_path}")
        with open(cfg.matrix_path, "rb") as f:
            A = decode_matrix(f.read())
        source = cfg.matrix_path
    else:
        spec = cfg.model_spec()
        d, r = spec.dims[0]
        A = sample_sparse_dictionary(d, r, spec.s_col(1) if spec.L > 1 else spec.code_sparsity,
                                     spec.dict_law, stream(cfg.seed, "A1"))
        source = f"sparse_dictionary:{d}x{r}"
    if normalize:
        A = column_normalize(A)
    estimate = rip_constant_estimate(A, cfg.rip_order, cfg.trials, seed=cfg.seed,
                                     n_jobs=cfg.threads)
    document = estimate.to_dict()
    document.update(source=source, seed=cfg.seed, normalized=normalize)
    path = _storage(cfg.out_dir).save_json("rip.json", document)
    kind = "穷举" if estimate.exhaustive else "采样下界"
    click.echo(f"delta_{cfg.rip_order} = {estimate.delta_hat:.6g}（{kind}，{estimate.trials} 个支撑集）")
    click.echo(f"已写入 {path}")


@cli.command()
@click.option("--r", "r", type=int, default=None, help="元素总数")
@click.option("--s", "s", type=int, default=None, help="每次抽取的子集大小")
@click.option("--trials", type=int, default=None, help="试验次数")
@click.pass_context
@exit_on_error
def coupon(ctx: click.Context, r: Optional[int], s: Optional[int], trials: Optional[int]) -> None:
    """子集抽取版赠券收集问题的蒙特卡洛估计，写出 coupon.json"""
    cfg = with_overrides(_config(ctx), r=r, s=s, trials=trials)
    estimate = coupon_collector_trials(cfg.r, cfg.s, cfg.trials, seed=cfg.seed)
    bound = conjectured_lower_bound(cfg.r, cfg.s) if cfg.r > 1 else 0.0
    document = {
        "r": cfg.r, "s": cfg.s, "trials": cfg.trials, "seed": cfg.seed,
        "mean_draws": estimate.mean_draws, "stderr": estimate.stderr,
        "conjectured_lower_bound": bound,
        "ratio_to_bound": estimate.mean_draws / bound if bound > 0 else None,
        "harmonic_expectation": harmonic_expectation(cfg.r) if cfg.s == 1 else None,
    }
    path = _storage(cfg.out_dir).save_json("coupon.json", document)
    click.echo(f"平均抽取次数 {estimate.mean_draws:.4f} ± {estimate.stderr:.4f}（(r/s)·ln r = {bound:.4f}）")
    click.echo(f"已写入 {path}")


if __name__ == '__main__':
    cli()
