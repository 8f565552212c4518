#    This file is part of spanoracle.
#
#    spanoracle is free software: you can redistribute it and/or modify
#    it under the terms of the GNU General Public License as published by
#    the Free Software Foundation, either version 3 of the License, or
#    (at your option) any later version.
#
#    spanoracle is distributed in the hope that it will be useful,
#    but WITHOUT ANY WARRANTY; without even the implied warranty of
#    MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
#    GNU General Public License for more details.
#
#    You should have received a copy of the GNU General Public License
#    along with spanoracle.  If not, see <http://www.gnu.org/licenses/>.

import sys

from .config import load_config, ConfigException
from .commands import (RunConfig, UsageException, ErrorReport, EEXIT,
    COMMANDS, run, pairs_from_args)

import logging

from optparse import OptionParser

USAGE = "%prog COMMAND [options] [v1 v2 ...]\n\ncommands: " + \
    ", ".join(sorted(COMMANDS))

# family parameters and the option they come from
FAMILY_PARAMS = ("n", "p", "rows", "cols", "radius", "weighted")

class CommandParser(OptionParser):
    def error(self, msg):
        raise UsageException(msg)

def build_parser():
    parser = CommandParser(usage=USAGE, prog="spanoracle")
    parser.add_option("--in", dest="graph_path", metavar="FILE",
                      help="Graph FILE; the oracle FILE for query")
    parser.add_option("--out", dest="output_path", metavar="FILE",
                      help="Where to write the graph, net, oracle or embedding")
    parser.add_option("--pairs", dest="pairs_path", metavar="FILE",
                      help="Query pairs, one `v1 v2` per line")
    parser.add_option("--net", dest="net_path", metavar="FILE",
                      help="Net file to verify or to use as landmarks")
    parser.add_option("--kind", dest="kind",
                      help="Oracle kind: simple, tz or combined")
    parser.add_option("--eps", dest="eps", type="float")
    parser.add_option("--delta", dest="delta", type="float")
    parser.add_option("--k", dest="k", type="int",
                      help="Thorup-Zwick levels")
    parser.add_option("--m", dest="m", type="int",
                      help="Compressed star embedding dimension")
    parser.add_option("--seed", dest="seed", type="int")
    parser.add_option("--method", dest="method",
                      help="Net construction: greedy or sample")
    parser.add_option("--mode", dest="mode",
                      help="Star embedding: exact or compressed")
    parser.add_option("--family", dest="family",
                      help="Graph family for gen")
    parser.add_option("--n", dest="n", type="int")
    parser.add_option("--p", dest="p", type="float")
    parser.add_option("--rows", dest="rows", type="int")
    parser.add_option("--cols", dest="cols", type="int")
    parser.add_option("--radius", dest="radius", type="float")
    parser.add_option("--weighted", dest="weighted", action="store_true")
    parser.add_option("--unweighted", dest="weighted", action="store_false")
    parser.add_option("--max-size", dest="max_size", type="int", default=3,
                      help="Largest subset vc-check tries")
    parser.add_option("--config", dest="config", metavar="FILE",
                      help="YAML configuration FILE")
    parser.add_option("--report", dest="report", metavar="FILE",
                      help="Write the JSON report to FILE")
    parser.add_option("--log", dest="log", default="warning",
                      help="Log level")
    return parser

def get_args(argv=None):
    options, args = build_parser().parse_args(argv)
    auto_args(options)
    return options, args

def auto_args(options):
    """
    Set up logging from --log.
    """
    level = getattr(logging, options.log.upper(), None)
    if not isinstance(level, int):
        raise UsageException("Unknown log level '{0}'".format(options.log))
    logging.basicConfig(level=level)

def run_config(options, args):
    if not args:
        raise UsageException("Missing command")
    command, rest = args[0], args[1:]
    if rest and command != "query":
        raise UsageException("{0} takes no arguments".format(command))
    params = dict((name, getattr(options, name)) for name in FAMILY_PARAMS
        if getattr(options, name) is not None)
    return RunConfig(
        command,
        graph_path=options.graph_path,
        eps=options.eps,
        delta=options.delta,
        k=options.k,
        m=options.m,
        seed=options.seed,
        method=options.method,
        mode=options.mode,
        output_path=options.output_path,
        pairs_path=options.pairs_path,
        pairs=pairs_from_args(rest),
        net_path=options.net_path,
        kind=options.kind,
        family=options.family,
        params=params,
        max_size=options.max_size,
        config=load_config(options.config),
    )

def main(argv=None, stdout=None):
    """
    Run one command. Query answers go to stdout one per line and the
    report only to --report; every other command prints its report.
    Returns the exit code.
    """
    stdout = stdout or sys.stdout
    try:
        options, args = get_args(argv)
        cfg = run_config(options, args)
    except (UsageException, ConfigException) as e:
        report = ErrorReport(None, e, EEXIT.USAGE)
        stdout.write(report.to_json() + "\n")
        return EEXIT.USAGE
    except EnvironmentError as e:
        report = ErrorReport(None, e, EEXIT.INPUT)
        stdout.write(report.to_json() + "\n")
        return EEXIT.INPUT
    code, report = run(cfg)
    if options.report:
        with open(options.report, "w") as f:
            f.write(report.to_json() + "\n")
    if report.lines:
        stdout.write("\n".join(report.lines) + "\n")
    elif not options.report:
        stdout.write(report.to_json() + "\n")
    return code

if __name__ == "__main__":
    sys.exit(main())
