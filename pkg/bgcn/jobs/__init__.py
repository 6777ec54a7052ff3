"""Jobs: verificação de gradientes e estudo de ablação."""

from .ablation import run_ablation_study
from .gradcheck import run_gradcheck

__all__ = ["run_ablation_study", "run_gradcheck"]
