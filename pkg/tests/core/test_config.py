import pytest

from levy_area.core.config import ENV_PREFIX, Settings, load_settings
from levy_area.core.coupling_oracle import DEFAULT_CLAMP, DEFAULT_P_REF
from levy_area.core.errors import ConfigurationError
from levy_area.core.levy_algorithms import DEFAULT_MEMORY_CAP, SeriesKernelConfig

KEYS = ("SEED", "MEMORY_CAP", "BLOCK_SIZE", "P_REF", "CLAMP", "LOG_LEVEL")


@pytest.fixture
def env(monkeypatch, tmp_path):
    """Empty LEVY_AREA_* environment, restored afterwards even if a .env file sets keys."""
    for key in KEYS:
        monkeypatch.setenv(ENV_PREFIX + key, "")
        monkeypatch.delenv(ENV_PREFIX + key)

    def set_values(**values):
        for key, value in values.items():
            monkeypatch.setenv(ENV_PREFIX + key, value)

    set_values.missing_dotenv = str(tmp_path / "missing.env")
    return set_values


def test_defaults(env):
    assert load_settings(env.missing_dotenv) == Settings()
    settings = Settings()
    assert settings.memory_cap == DEFAULT_MEMORY_CAP
    assert settings.p_ref == DEFAULT_P_REF
    assert settings.clamp == DEFAULT_CLAMP
    assert settings.seed is None


def test_environment_values(env):
    env(SEED="0x10", MEMORY_CAP="4096", BLOCK_SIZE="8", P_REF="5000", CLAMP="1e-10", LOG_LEVEL="debug")
    settings = load_settings(env.missing_dotenv)
    assert settings == Settings(seed=16, memory_cap=4096, block_size=8, p_ref=5000, clamp=1e-10, log_level="DEBUG")
    assert settings.kernel_config() == SeriesKernelConfig(block_size=8, memory_cap=4096)


def test_blank_values_fall_back_to_defaults(env):
    env(SEED="  ", P_REF="")
    assert load_settings(env.missing_dotenv) == Settings()


def test_dotenv_file(env, tmp_path):
    dotenv = tmp_path / ".env"
    dotenv.write_text(f"{ENV_PREFIX}SEED=42\n{ENV_PREFIX}P_REF=777\n", encoding="utf-8")
    env(P_REF="1000")
    settings = load_settings(str(dotenv))
    assert settings.seed == 42
    # the environment wins over the file
    assert settings.p_ref == 1000


@pytest.mark.parametrize(
    "key, raw",
    [
        ("SEED", "-1"),
        ("SEED", str(2**64)),
        ("SEED", "abc"),
        ("MEMORY_CAP", "0"),
        ("BLOCK_SIZE", "2.5"),
        ("P_REF", "many"),
        ("CLAMP", "1.5"),
        ("CLAMP", "-0.1"),
        ("LOG_LEVEL", "loud"),
    ],
)
def test_malformed_values(env, key, raw):
    env(**{key: raw})
    with pytest.raises(ConfigurationError, match=ENV_PREFIX + key):
        load_settings(env.missing_dotenv)
