import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def _env(key, default):
    return os.environ.get(f"SUPERTAU_{key}", default)


class Config:
    """Base configuration class."""
    PMAX = int(_env('PMAX', 3))
    KMAX = int(_env('KMAX', 3))
    TRUNCATION_P = int(_env('TRUNCATION_P', 4))
    TRUNCATION_K = int(_env('TRUNCATION_K', 4))
    SERIES_WINDOW = int(_env('SERIES_WINDOW', 6))

    # 'symbolic' or a rational such as '1/2'
    C0 = _env('C0', 'symbolic')

    THREADS = int(_env('THREADS', os.cpu_count() or 1))
    DEBUG = False
    LOG_LEVEL = _env('LOG_LEVEL', 'WARNING')
    DATA_DIR = _env('DATA_DIR', os.path.join(BASE_DIR, 'data'))
    PROPERTY_CASES = int(_env('PROPERTY_CASES', 1000))


class DevelopmentConfig(Config):
    """Development configuration."""
    DEBUG = True
    LOG_LEVEL = _env('LOG_LEVEL', 'INFO')


class TestingConfig(Config):
    """Testing configuration."""
    DEBUG = True
    # Small truncations keep the unit run fast
    PMAX = 2
    KMAX = 2
    TRUNCATION_P = 2
    TRUNCATION_K = 2
    SERIES_WINDOW = 4
    THREADS = 1
    PROPERTY_CASES = int(_env('PROPERTY_CASES', 50))


class ProductionConfig(Config):
    """Full verification runs."""
    DEBUG = False


# Configuration dictionary to easily access different configs
config = {
    'development': DevelopmentConfig,
    'testing': TestingConfig,
    'production': ProductionConfig,
    'default': DevelopmentConfig
}


def configure_engine(engine, environment='default'):
    """Copy the settings of the chosen environment onto an engine."""
    settings = config[environment]
    engine.config = {key: getattr(settings, key) for key in dir(settings) if key.isupper()}
    engine.config['ENVIRONMENT'] = environment
