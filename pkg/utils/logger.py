"""
Logger Module
Logging setup and a console logger for check/progress messages
"""

import sys
import logging
from collections import deque
from datetime import datetime

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logging(level='INFO', log_file=None):
    """Configure root logging. Diagnostics go to stderr, stdout stays reserved for results."""
    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file, encoding='utf-8'))

    logging.basicConfig(
        format=LOG_FORMAT,
        level=getattr(logging, str(level).upper(), logging.INFO),
        handlers=handlers,
        force=True,
    )


class ConsoleLogger:
    """Logger that writes user-facing lines to a stream and mirrors them to logging"""

    def __init__(self, stream=None, history_size=500, timestamps=False):
        self.stream = stream
        self.timestamps = timestamps
        self.history = deque(maxlen=history_size)

    def log(self, message, level='info'):
        timestamp = datetime.now().strftime('%H:%M:%S')
        formatted_message = f"[{timestamp}] {message}" if self.timestamps else message

        self.history.append({
            'message': message,
            'level': level,
            'timestamp': timestamp
        })

        stream = self.stream if self.stream is not None else sys.stdout
        try:
            print(formatted_message, file=stream)
        except (OSError, ValueError) as e:
            logger.error(f"Error writing to console stream: {e}")

        getattr(logger, level.lower(), logger.info)(message)

    def messages(self, level=None):
        return [entry['message'] for entry in self.history if level is None or entry['level'] == level]
