import argparse
import json
import sys
import time
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
import pandas as pd

from .coherence import coherence_report, format_coherence_table
from .config import DEFAULT_SEEDS, ExperimentConfig, RunConfig, parse_config
from .corpus import Vocabulary, prepare_corpus, write_split_manifest
from .corpus.pipeline import PreparedCorpus
from .experiments import EvalReport, head_sweep, lambda_sweep, multi_seed, run_training
from .model.params import ModelParams
from .persist import SingleJsonFilePersistStrategy
from .topics import EntropyReport, entropy_report, scan_corpus, topic_descriptors
from .topics.models import TopicDescriptor
from .training import GradCheckSummary, evaluate, load_checkpoint, random_gradcheck
from .utils.custom_json import dump_jsonl
from .utils.logger import logger
from .utils.parallel import resolve_threads

COMMANDS = (
    "prepare",
    "train",
    "eval",
    "topics",
    "coherence",
    "entropy-report",
    "gradcheck",
    "lambda-sweep",
    "head-sweep",
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_GRADCHECK_FAILED = 2


def _parse_seeds(value: str) -> list[int]:
    if value == "default":
        return list(DEFAULT_SEEDS)
    try:
        return [int(s) for s in value.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"--seeds 需要逗号分隔的整数列表，得到 {value!r}")


def build_parser() -> argparse.ArgumentParser:
    """The argument parser of the ``batm`` command."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="JSON 配置文件路径。")
    common.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="覆盖单个配置项，可重复使用，优先级高于配置文件。",
    )
    common.add_argument(
        "--out", type=Path, default=Path("runs/default"), help="输出目录，所有产物都写在这里。"
    )
    common.add_argument("--seed", type=int, default=None, help="随机种子，覆盖配置中的 seed。")
    common.add_argument(
        "--seeds",
        type=_parse_seeds,
        nargs="?",
        const="default",
        default=None,
        help="多种子运行，例如 1,2,3；不带参数时为 1..5。",
    )
    common.add_argument(
        "--threads", type=int, default=None, help="工作线程数。默认读取 BATM_THREADS，否则为 CPU 核数。"
    )
    common.add_argument(
        "--checkpoint",
        type=Path,
        default=None,
        help="模型检查点路径。默认为 <out>/<checkpoint_name>。",
    )

    parser = argparse.ArgumentParser(
        prog="batm",
        description="BATM: 基于双层注意力的可解释主题文本分类工具。",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "prepare": "读取语料，构建词表并划分训练/验证/测试集。",
        "train": "训练模型并保存验证集上最好的检查点。",
        "eval": "在验证集和测试集上评估检查点。",
        "topics": "导出每个注意力头的主题描述词。",
        "coherence": "计算主题描述词的 C_v 一致性。",
        "entropy-report": "计算文档级与词级注意力熵。",
        "gradcheck": "用有限差分校验反向传播梯度。",
        "lambda-sweep": "对熵约束权重 lambda 做扫描实验。",
        "head-sweep": "对注意力头数 K 做扫描实验。",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def parse_args(argv: Sequence[str] | None = None) -> RunConfig:
    args = build_parser().parse_args(argv)
    return RunConfig(
        command=args.command,
        config_path=args.config,
        overrides=args.overrides,
        out_dir=args.out,
        seed=args.seed,
        seeds=args.seeds,
        threads=args.threads,
        checkpoint=args.checkpoint,
    )


def _checkpoint_path(config: ExperimentConfig, run: RunConfig) -> Path:
    return run.checkpoint or run.out_dir / config.checkpoint_name


def _load_model(config: ExperimentConfig, run: RunConfig, prepared: PreparedCorpus) -> ModelParams:
    path = _checkpoint_path(config, run)
    params, _, metadata = load_checkpoint(path, dtype=np.dtype(config.precision))
    labels = metadata.get("labels")
    if labels is not None and labels != prepared.split.labels:
        raise ValueError(f"Checkpoint {path} was trained on labels {labels}, corpus has {prepared.split.labels}")
    if params.vocab_size != len(prepared.vocab):
        raise ValueError(
            f"Checkpoint {path} has {params.vocab_size} embedding rows, vocabulary has {len(prepared.vocab)}"
        )
    return params


def _descriptors(
    config: ExperimentConfig, prepared: PreparedCorpus, params: ModelParams, threads: int
) -> list[TopicDescriptor]:
    sequences = [e.sequence for e in prepared.examples_of(config.topic_corpus)]
    scan = scan_corpus(params, sequences, prepared.vocab, threads)
    return topic_descriptors(
        scan.matrices, config.top_t, prepared.vocab, config.descriptor_average, scan.head_usage
    )


def cmd_prepare(config: ExperimentConfig, run: RunConfig, threads: int) -> int:
    prepared = prepare_corpus(config)
    write_split_manifest(prepared, run.out_dir / "splits.jsonl")
    SingleJsonFilePersistStrategy(Vocabulary).save(prepared.vocab, run.out_dir / "vocabulary.json")
    (run.out_dir / "label_map.json").write_text(
        json.dumps(prepared.split.label_map, ensure_ascii=False, indent=2), encoding="utf-8"
    )
    split = prepared.split
    logger.success(
        f"语料准备完成: {len(split.train)}/{len(split.validation)}/{len(split.test)} 篇文档, "
        f"{split.num_classes} 个类别, 词表大小 {len(prepared.vocab)}"
    )
    return EXIT_OK


def cmd_train(config: ExperimentConfig, run: RunConfig, threads: int) -> int:
    prepared = prepare_corpus(config)
    if run.seeds:
        multi_seed(config, prepared, run.seeds, run.out_dir, threads)
    else:
        run_training(config, prepared, run.out_dir, threads)
    return EXIT_OK


def cmd_eval(config: ExperimentConfig, run: RunConfig, threads: int) -> int:
    prepared = prepare_corpus(config)
    params = _load_model(config, run, prepared)
    split = prepared.split
    report = EvalReport(
        checkpoint=_checkpoint_path(config, run),
        labels=split.labels,
        validation=evaluate(params, split.validation, split.num_classes, threads) if split.validation else None,
        test=evaluate(params, split.test, split.num_classes, threads) if split.test else None,
    )
    SingleJsonFilePersistStrategy(EvalReport).save(report, run.out_dir / "eval.json")
    for name, result in (("validation", report.validation), ("test", report.test)):
        if result is not None:
            logger.success(f"{name}: accuracy={result.accuracy:.4f} macro_f1={result.macro_f1:.4f}")
    return EXIT_OK


def cmd_topics(config: ExperimentConfig, run: RunConfig, threads: int) -> int:
    prepared = prepare_corpus(config)
    params = _load_model(config, run, prepared)
    examples = prepared.examples_of(config.topic_corpus)
    scan = scan_corpus(params, [e.sequence for e in examples], prepared.vocab, threads)
    descriptors = topic_descriptors(
        scan.matrices, config.top_t, prepared.vocab, config.descriptor_average, scan.head_usage
    )
    dump_jsonl(descriptors, run.out_dir / "descriptors.jsonl")
    if config.export_matrices:
        doc_ids = [e.doc_id for e in examples]
        frame = pd.DataFrame(
            [(M.head, *t) for M in scan.matrices for t in M.triplets(doc_ids)],
            columns=["head", "doc_id", "token_id", "weight"],
        )
        frame.to_csv(run.out_dir / "topic_matrices.csv", index=False)
    for d in sorted(descriptors, key=lambda d: -(d.head_usage or 0.0))[:5]:
        logger.info(f"head {d.head} (usage {d.head_usage:.3f}): {' '.join(d.words[:10])}")
    logger.success(f"已导出 {len(descriptors)} 个主题描述到 {run.out_dir / 'descriptors.jsonl'}")
    return EXIT_OK


def cmd_coherence(config: ExperimentConfig, run: RunConfig, threads: int) -> int:
    prepared = prepare_corpus(config)
    params = _load_model(config, run, prepared)
    descriptors = _descriptors(config, prepared, params, threads)
    result = coherence_report(
        descriptors,
        prepared.tokens_of("train"),
        s=config.window_size,
        T=config.top_t,
        eps=config.coherence_eps,
        threads=threads,
    )
    (run.out_dir / "coherence.json").write_text(result.model_dump_json(indent=2), encoding="utf-8")
    (run.out_dir / "coherence.txt").write_text(format_coherence_table(result), encoding="utf-8")
    logger.success(f"平均 C_v: {result.average_cv}")
    return EXIT_OK


def cmd_entropy_report(config: ExperimentConfig, run: RunConfig, threads: int) -> int:
    prepared = prepare_corpus(config)
    params = _load_model(config, run, prepared)
    sequences = [e.sequence for e in prepared.examples_of(config.topic_corpus)]
    report = entropy_report(params, sequences, prepared.vocab, threads)
    SingleJsonFilePersistStrategy(EntropyReport).save(report, run.out_dir / "entropy_report.json")
    logger.success(
        f"avg E_doc={report.avg_doc_entropy:.4f}, avg E_token={report.avg_token_entropy}"
    )
    return EXIT_OK


def cmd_gradcheck(config: ExperimentConfig, run: RunConfig, threads: int) -> int:
    summary = random_gradcheck(num_configs=20, lambdas=(0.0, 1e-3), seed=config.seed)
    SingleJsonFilePersistStrategy(GradCheckSummary).save(summary, run.out_dir / "gradcheck.json")
    print(f"max relative error: {summary.max_rel_error:.3e}")
    if not summary.passed:
        logger.error(f"梯度校验失败: 最大相对误差 {summary.max_rel_error:.3e} >= {summary.threshold}")
        return EXIT_GRADCHECK_FAILED
    logger.success(f"梯度校验通过 ({len(summary.runs)} 次检查)")
    return EXIT_OK


def cmd_lambda_sweep(config: ExperimentConfig, run: RunConfig, threads: int) -> int:
    prepared = prepare_corpus(config)
    lambda_sweep(config, prepared, config.lambda_list, run.out_dir, threads)
    return EXIT_OK


def cmd_head_sweep(config: ExperimentConfig, run: RunConfig, threads: int) -> int:
    prepared = prepare_corpus(config)
    head_sweep(config, prepared, config.head_list, run.out_dir, threads)
    return EXIT_OK


HANDLERS: dict[str, Callable[[ExperimentConfig, RunConfig, int], int]] = {
    "prepare": cmd_prepare,
    "train": cmd_train,
    "eval": cmd_eval,
    "topics": cmd_topics,
    "coherence": cmd_coherence,
    "entropy-report": cmd_entropy_report,
    "gradcheck": cmd_gradcheck,
    "lambda-sweep": cmd_lambda_sweep,
    "head-sweep": cmd_head_sweep,
}


def _write_error(run: RunConfig, error: BaseException):
    record = {"command": run.command, "error_type": type(error).__name__, "message": str(error)}
    try:
        run.out_dir.mkdir(parents=True, exist_ok=True)
        (run.out_dir / "error.json").write_text(json.dumps(record, ensure_ascii=False, indent=2), encoding="utf-8")
    except OSError as e:
        logger.error(f"无法写入错误记录: {e}")


def dispatch(run: RunConfig) -> int:
    """Run one subcommand and map its outcome to a process exit status.

    The effective configuration is written to ``<out>/effective_config.json``
    before the command starts. Any failure is logged and recorded in
    ``<out>/error.json``.

    Returns:
        0 on success, 2 when a gradient check exceeds its threshold, 1 otherwise.
    """
    start_time = time.time()
    try:
        config = parse_config(run.config_path, run.overrides)
        update: dict[str, object] = {}
        if run.seed is not None:
            update["seed"] = run.seed
        if run.seeds:
            update["seeds"] = run.seeds
        if update:
            config = ExperimentConfig.model_validate({**config.echo(), **update})
        threads = resolve_threads(run.threads)

        run.out_dir.mkdir(parents=True, exist_ok=True)
        (run.out_dir / "effective_config.json").write_text(
            json.dumps(config.echo(), ensure_ascii=False, indent=2), encoding="utf-8"
        )
        logger.info(f"运行 {run.command}, 输出目录 {run.out_dir}, 线程数 {threads}")
        status = HANDLERS[run.command](config, run, threads)
    except Exception as e:
        logger.error(f"{run.command} 失败: {type(e).__name__}: {e}")
        _write_error(run, e)
        return EXIT_ERROR
    logger.info(f"{run.command} 耗时 {time.time() - start_time:.2f} 秒")
    return status


def main(argv: Sequence[str] | None = None):
    """Command-line interface of batm.

    For detailed usage information, run:
        uv run -m batm --help

    Note:
        This function is designed to be called from the command line via the
        entry point defined in pyproject.toml.
    """
    sys.exit(dispatch(parse_args(argv)))


if __name__ == "__main__":
    main()
