"""
Exact verification of super tau-covers of Frobenius-manifold hierarchies and KdV.
"""
import logging

from config.config import configure_engine

logger = logging.getLogger(__name__)


class Engine:
    """Holds the resolved configuration and the specs and covers built from it."""

    def __init__(self):
        self.config = {}
        self.specs = {}
        self._kdv = {}

    def __repr__(self):
        return f"<Engine {self.config.get('ENVIRONMENT')}>"

    @property
    def truncation(self):
        return self.config['TRUNCATION_P'], self.config['TRUNCATION_K']

    def frobenius(self, name_or_path):
        """Load a validated spec once per engine."""
        from supertau.utils.spec_import import load_spec

        if name_or_path not in self.specs:
            self.specs[name_or_path] = load_spec(name_or_path, self.config['DATA_DIR'])
        return self.specs[name_or_path]

    def cover(self, name_or_path, truncation=None):
        from supertau.utils.frobenius_flows import SuperTauCover

        return SuperTauCover(self.frobenius(name_or_path), truncation=truncation,
                             debug=self.config['DEBUG'])

    def kdv(self, truncation=None):
        from supertau.utils.kdv import KdvCover

        key = truncation
        if key not in self._kdv:
            self._kdv[key] = KdvCover(truncation=truncation, debug=self.config['DEBUG'])
        return self._kdv[key]


def create_engine(config_name='default'):
    """Create and configure an engine."""
    engine = Engine()
    configure_engine(engine, config_name)
    logging.getLogger('supertau').setLevel(engine.config['LOG_LEVEL'])
    logger.debug(f"Engine configured for {config_name}")
    return engine
