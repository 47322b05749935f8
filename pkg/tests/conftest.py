"""
Global test fixtures.

Points SCATTERLAB_CONFIG_PATH at an isolated temp file so tests never
read the real user settings, and makes result timestamps fixed.
"""

import os
import tempfile

# Must be set before any scatterlab.cli module is imported, since
# cli/config.py reads the settings file at module load time.
_tmp = tempfile.NamedTemporaryFile(suffix=".toml", delete=False, mode="w")
_tmp.write('cli_log_level = "WARNING"\n')
_tmp.close()
os.environ["SCATTERLAB_CONFIG_PATH"] = _tmp.name
os.environ.pop("SOURCE_DATE_EPOCH", None)
