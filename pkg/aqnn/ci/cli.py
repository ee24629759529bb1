#!/usr/bin/env python

# Copyright (c) 2026 aqnn contributors and others.
#
# All rights reserved. This program and the accompanying materials
# are made available under the terms of the Apache License, Version 2.0
# which accompanies this distribution, and is available at
# http://www.apache.org/licenses/LICENSE-2.0

"""The aqnn command line.

Exit codes: 0 success, 1 usage error, 2 data or model error (and
failed acceptance checks for verify).
"""

import argparse
import json
import logging
import logging.config
import os
import sys

import prettytable

from aqnn.ci import run_checks
from aqnn.core import baselines
from aqnn.core import data
from aqnn.core import evaluation
from aqnn.core import model_io
from aqnn.core import nn
from aqnn.core import serve
from aqnn.core import training
from aqnn.utils import config
from aqnn.utils import constants
from aqnn.utils import env
from aqnn.utils import exceptions

LOGGER = logging.getLogger('aqnn.ci.cli')

EX_OK = os.EX_OK
EX_USAGE = 1
EX_DATA = 2

SPLITS = ('train', 'val', 'test')


class UsageError(Exception):
    """Invalid flag or environment value detected after parsing"""


def _positive_int(value):
    try:
        number = int(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"invalid integer {value!r}") from exc
    if number < 1:
        raise argparse.ArgumentTypeError(f"{value} is not >= 1")
    return number


def _positive_float(value):
    try:
        number = float(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid number {value!r}") from exc
    if not number > 0:
        raise argparse.ArgumentTypeError(f"{value} is not > 0")
    return number


class AqnnParser(argparse.ArgumentParser):
    """ArgumentParser exiting with EX_USAGE on errors"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _add_model(parser):
    parser.add_argument("--model", help="model file (default $AQNN_MODEL)")


def _add_data(parser, required_help="dataset CSV (default $AQNN_DATA)"):
    parser.add_argument("--data", help=required_help)


def _add_training(parser):
    parser.add_argument("--epochs", type=_positive_int)
    parser.add_argument("--batch", type=_positive_int, dest='batch_size')
    parser.add_argument("--lr", type=_positive_float)
    parser.add_argument("--seed", type=int,
                        help="shuffle/init seed (default $AQNN_SEED)")


def build_parser():
    parser = AqnnParser(
        prog='aqnn',
        description="Indoor activity recognition from six gas sensors")
    parser.add_argument("--config", help="aqnn.yaml overriding the defaults")
    commands = parser.add_subparsers(dest='command', metavar='command')
    commands.required = True

    train = commands.add_parser('train', help="train the reference CNN")
    _add_data(train)
    _add_training(train)
    train.add_argument("--out", default='model.aqnn')
    train.add_argument("--history", help="history CSV (default "
                       "<out>.history.csv)")
    train.add_argument("--splits-dir",
                       help="also write train/val/test CSV partitions")
    train.set_defaults(func=cmd_train)

    evaluate = commands.add_parser('eval', help="evaluate a model")
    _add_model(evaluate)
    _add_data(evaluate)
    evaluate.add_argument("--json", help="write the report as JSON")
    evaluate.add_argument("--cm-csv", help="write the confusion matrix")
    evaluate.set_defaults(func=cmd_eval)

    predict = commands.add_parser('predict', help="classify unlabeled rows")
    _add_model(predict)
    _add_data(predict)
    predict.add_argument("--ignore-labels", action='store_true',
                         help="accept 7-column rows and drop the label")
    predict.set_defaults(func=cmd_predict)

    serve_parser = commands.add_parser(
        'serve', help="stream predictions over stdin/stdout or TCP")
    _add_model(serve_parser)
    serve_parser.add_argument("--tcp", action='store_true',
                              help="listen on TCP instead of stdin")
    serve_parser.add_argument("--host", help="default $AQNN_HOST")
    serve_parser.add_argument("--port", type=int,
                              help="default $AQNN_PORT; either implies --tcp")
    serve_parser.add_argument("--threshold", type=_positive_float,
                              help="default $AQNN_ALERT_THRESHOLD")
    serve_parser.add_argument("--consecutive", type=_positive_int,
                              help="default $AQNN_ALERT_CONSECUTIVE")
    serve_parser.set_defaults(func=cmd_serve)

    synth = commands.add_parser('synth', help="write a synthetic dataset")
    synth.add_argument("--n-per-class", type=_positive_int, default=300)
    synth.add_argument("--seed", type=int)
    synth.add_argument("--out", required=True)
    synth.set_defaults(func=cmd_synth)

    bench = commands.add_parser('bench', help="single-sample latency")
    _add_model(bench)
    _add_data(bench, "readings to cycle through (default synthetic)")
    bench.add_argument("--iterations", type=_positive_int)
    bench.add_argument("--warmup", type=int)
    bench.set_defaults(func=cmd_bench)

    baseline = commands.add_parser('baseline', help="KNN or MLP baseline")
    baseline.add_argument("kind", choices=('knn', 'mlp'))
    _add_data(baseline)
    _add_training(baseline)
    baseline.add_argument("--k", type=_positive_int)
    baseline.add_argument("--out", help="MLP model file")
    baseline.set_defaults(func=cmd_baseline)

    verify = commands.add_parser('verify', help="run the acceptance checks")
    verify.add_argument("-t", "--test", default='all',
                        help="check or tier to run (default all)")
    verify.set_defaults(func=cmd_verify)

    sensors = commands.add_parser('sensors', help="sensor/gas table")
    sensors.set_defaults(func=cmd_sensors)
    return parser


def _resolve(args, name, env_var, default, cast=str):
    try:
        return config.resolve(getattr(args, name, None), env_var, default,
                              cast)
    except ValueError as exc:
        raise UsageError(f"invalid ${env_var}: {exc}") from exc


def _required(args, name, env_var):
    value = _resolve(args, name, env_var, None)
    if not value:
        raise UsageError(f"--{name} (or ${env_var}) is required")
    return value


def _train_config(args, conf):
    section = conf.get('train', {})
    return training.TrainConfig(
        epochs=args.epochs or section.get('epochs', 200),
        batch_size=args.batch_size or section.get('batch_size', 64),
        lr=args.lr or section.get('lr', 0.001),
        beta1=section.get('beta1', 0.9),
        beta2=section.get('beta2', 0.999),
        epsilon=section.get('epsilon', 1e-7),
        seed=_resolve(args, 'seed', 'AQNN_SEED', section.get('seed', 42),
                      int))


def _splits(args, conf, seed):
    """Load, split and normalize the labeled dataset"""
    dataset = data.load_csv(_required(args, 'data', 'AQNN_DATA'))
    LOGGER.info("Class distribution:\n%s", data.class_distribution(dataset))
    section = conf.get('split', {})
    parts = data.shuffle_split(dataset, data.SplitSpec(
        section.get('train', 0.7), section.get('val', 0.2),
        section.get('test', 0.1), seed))
    splits_dir = getattr(args, 'splits_dir', None)
    if splits_dir:
        os.makedirs(splits_dir, exist_ok=True)
        for name, part in zip(SPLITS, parts):
            data.save_csv(part, os.path.join(splits_dir, f"{name}.csv"))
    return parts + (data.fit_normalizer(parts[0]),)


def _fit(net, parts, cfg):
    train, val, test, norm = parts
    best, history = training.train(
        net, data.normalize(train, norm), data.normalize(val, norm), cfg)
    best.restore(net)
    LOGGER.info("Best epoch %d (val_acc %.4f)", best.epoch, best.val_acc)
    table = prettytable.PrettyTable(
        header_style='upper', padding_width=5,
        field_names=['split', 'accuracy (%)', 'loss'])
    for name, part in zip(('Train', 'Validation', 'Test'),
                          (train, val, test)):
        if len(part):
            loss, accuracy = training.measure(
                net, *data.normalize(part, norm))
            table.add_row([name, f"{100 * accuracy:.2f}", f"{loss:.4f}"])
        else:
            table.add_row([name, '-', '-'])
    return history, table


def cmd_train(args, conf):
    cfg = _train_config(args, conf)
    parts = _splits(args, conf, cfg.seed)
    net = nn.init_network(nn.REFERENCE_CNN, cfg.seed)
    history, table = _fit(net, parts, cfg)
    model_io.save_model(net, parts[3], args.out)
    training.export_history(
        history, args.history or f"{args.out}.history.csv")
    print(table)
    return EX_OK


def _load_model(args):
    net, norm = model_io.load_model(_required(args, 'model', 'AQNN_MODEL'))
    net.clear_cache()
    return net, norm


def cmd_eval(args, _conf):
    net, norm = _load_model(args)
    dataset = data.load_csv(_required(args, 'data', 'AQNN_DATA'))
    cm, report, loss = evaluation.evaluate(net, dataset, norm)
    print(report)
    print(cm)
    print(f"mean loss: {loss:.4f}")
    if args.json:
        document = report.as_dict()
        document.update(loss=loss, confusion_matrix=cm.counts.tolist())
        with open(args.json, 'w', encoding='utf-8') as jfile:
            json.dump(document, jfile, indent=2)
    if args.cm_csv:
        cm.to_csv(args.cm_csv)
    return EX_OK


def cmd_predict(args, _conf):
    net, norm = _load_model(args)
    try:
        dataset = data.load_csv(
            _required(args, 'data', 'AQNN_DATA'), labeled=False,
            drop_labels=args.ignore_labels)
    except exceptions.LabeledDataError as exc:
        raise exceptions.LabeledDataError(
            exc.lineno, "labeled data passed to predict "
            "(use --ignore-labels)") from exc
    session = serve.ServeSession(net, norm)
    for readings in dataset.readings:
        print(serve.dumps(session.predict(readings).as_dict()))
    return EX_OK


def _alert_rule(args, conf):
    section = conf.get('alert', {})
    try:
        return serve.AlertRule(
            section.get('trigger', data.SMOKE),
            _resolve(args, 'threshold', 'AQNN_ALERT_THRESHOLD',
                     section.get('threshold', serve.THRESHOLD), float),
            _resolve(args, 'consecutive', 'AQNN_ALERT_CONSECUTIVE',
                     section.get('consecutive', serve.CONSECUTIVE), int))
    except exceptions.InvalidArgumentError as exc:
        raise UsageError(f"invalid alert rule: {exc}") from exc


def cmd_serve(args, conf):
    net, norm = _load_model(args)
    rule = _alert_rule(args, conf)
    if args.tcp or args.port is not None or env.get('AQNN_PORT'):
        section = conf.get('serve', {})
        serve.serve_tcp(
            net, norm, rule,
            _resolve(args, 'host', 'AQNN_HOST',
                     section.get('host', serve.HOST)),
            _resolve(args, 'port', 'AQNN_PORT',
                     section.get('port', serve.PORT), int))
    else:
        serve.serve_stdio(net, norm, rule, serve.decoded_lines(sys.stdin),
                          sys.stdout)
    return EX_OK


def cmd_synth(args, _conf):
    seed = _resolve(args, 'seed', 'AQNN_SEED', 7, int)
    dataset = data.synth_generate(args.n_per_class, seed)
    data.save_csv(dataset, args.out)
    LOGGER.info("%d synthetic samples written to %s", len(dataset), args.out)
    return EX_OK


def cmd_bench(args, conf):
    net, norm = _load_model(args)
    section = conf.get('bench', {})
    if args.data:
        readings = data.load_csv(
            args.data, labeled=False, drop_labels=True).readings
    else:
        readings = data.synth_generate(50, 0).readings
    stats = evaluation.latency_benchmark(
        net, norm.apply(readings),
        args.iterations or section.get('iterations', 1000),
        section.get('warmup', evaluation.WARMUP) if args.warmup is None
        else args.warmup)
    print(stats)
    return EX_OK


def cmd_baseline(args, conf):
    cfg = _train_config(args, conf)
    parts = _splits(args, conf, cfg.seed)
    train, val, test, norm = parts
    if args.kind == 'knn':
        model = baselines.fit_knn(
            train, norm, args.k or conf.get('knn', {}).get(
                'k', baselines.K_NEIGHBORS))
        table = prettytable.PrettyTable(
            header_style='upper', padding_width=5,
            field_names=['split', 'accuracy (%)'])
        for name, part in (('Validation', val), ('Test', test)):
            if len(part):
                _, report = baselines.knn_evaluate(model, part, norm)
                table.add_row([name, f"{100 * report.accuracy:.2f}"])
                LOGGER.info("KNN on %s:\n%s", name, report)
        print(table)
        return EX_OK
    net = baselines.build_mlp(cfg.seed)
    _, table = _fit(net, parts, cfg)
    if args.out:
        size = model_io.save_model(net, norm, args.out)
    else:
        size = len(model_io.encode_model(net, norm))
    stats = evaluation.latency_benchmark(net, data.normalize(
        test if len(test) else train, norm)[0])
    print(table)
    print(f"parameters: {nn.count_params(net)}  file: {size} bytes  "
          f"mean latency: {1000 * stats.mean:.4f} ms")
    return EX_OK


def cmd_verify(args, _conf):
    runner = run_checks.Runner()
    if not runner.is_known(args.test):
        raise UsageError(f"unknown check or tier {args.test!r}")
    result = runner.main(test=args.test)
    return EX_OK if result == run_checks.Result.EX_OK else EX_DATA


def cmd_sensors(_args, _conf):
    msg = prettytable.PrettyTable(
        header_style='upper', padding_width=5,
        field_names=['sensor', 'gases'])
    msg.align['gases'] = 'l'
    for sensor in data.SENSORS:
        msg.add_row([sensor, ', '.join(data.SENSOR_GASES[sensor])])
    print(msg)
    return EX_OK


def cli_dispatch(argv):
    """Run one subcommand and return the exit code"""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        conf = config.load(args.config)
        return args.func(args, conf)
    except UsageError as exc:
        LOGGER.error("%s", exc)
        return EX_USAGE
    except (exceptions.AqnnError, OSError) as exc:
        if env.get('AQNN_DEBUG').lower() == 'true':
            LOGGER.exception("%s failed", args.command)
        else:
            LOGGER.error("%s", exc)
        return EX_DATA


def setup_logging():
    """Configure logging from logging.ini (logging.debug.ini when
    AQNN_DEBUG is true)"""
    results_dir = env.results_dir()
    os.makedirs(results_dir, exist_ok=True)
    defaults = {
        'logfilename': os.path.join(results_dir, constants.LOG_NAME),
        'debuglogfilename': os.path.join(
            results_dir, constants.DEBUG_LOG_NAME)}
    if env.get('AQNN_DEBUG').lower() == 'true':
        logging.config.fileConfig(config.get_aqnn_config(
            'logging.debug.ini', constants.DEBUG_INI_PATH_DEFAULT),
            defaults=defaults, disable_existing_loggers=False)
    else:
        logging.config.fileConfig(config.get_aqnn_config(
            'logging.ini', constants.INI_PATH_DEFAULT),
            defaults=defaults, disable_existing_loggers=False)
    logging.captureWarnings(True)


def main():
    """Entry point"""
    try:
        setup_logging()
    except OSError:
        print(f"Cannot create {env.results_dir()}", file=sys.stderr)
        return EX_DATA
    return cli_dispatch(sys.argv[1:])
