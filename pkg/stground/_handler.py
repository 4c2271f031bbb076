import logging


class TrainEvents:
    EPOCH_END = 'EPOCH_END'
    BATCH_END = 'BATCH_END'
    HANDLER_ERROR = 'HANDLER_ERROR'


class EventHandler:
    """Handlers registered per event, called in registration order; their exceptions are collected."""

    def __init__(self):
        self._handlers = {}
        self._errors = []

    @property
    def errors(self):
        return self._errors

    def on(self, event, f):
        handlers = self._handlers.setdefault(event, [])
        if f not in handlers:
            handlers.append(f)
        return f

    def handle_event(self, event, *args):
        handlers = self._handlers.get(event)
        if not handlers:
            logging.debug(f"no handler registered for event type `{event}`")
            return

        for handler in handlers:
            try:
                handler(*args)
            except Exception as e:
                logging.error(f"handler `{getattr(handler, '__name__', handler)}` failed on `{event}`: {e}")
                self._errors.append(e)

    def flush_errors(self):
        if self._errors:
            errors = list(self._errors)
            self._errors.clear()
            self.handle_event(TrainEvents.HANDLER_ERROR, errors)
