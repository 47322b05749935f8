#
# Copyright (c) 2025, Daily
#
# SPDX-License-Identifier: BSD 2-Clause License
#

from scatterlab.cli.entry_point import entrypoint_cli


def main():
    entrypoint_cli()


if __name__ == "__main__":
    main()
