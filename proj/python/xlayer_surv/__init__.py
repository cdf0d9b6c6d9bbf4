"""Cross-layer network survivability analysis.

Thin wrapper over the compiled extension.  Every function takes and returns
JSON/CSV text (or plain numbers), mirroring the xlayer-surv CLI.
"""

try:
    from ._xlayersurv import (  # type: ignore[attr-defined]
        XlayerError,
        analyze,
        check,
        export_model,
        generate,
        k_min,
        max_tree_prob,
        survivable_prob,
        sweep,
    )
except ImportError:  # extension living next to the package (build-tree layout)
    from _xlayersurv import (  # type: ignore[no-redef]
        XlayerError,
        analyze,
        check,
        export_model,
        generate,
        k_min,
        max_tree_prob,
        survivable_prob,
        sweep,
    )

__all__ = [
    "XlayerError",
    "analyze",
    "check",
    "export_model",
    "generate",
    "k_min",
    "max_tree_prob",
    "survivable_prob",
    "sweep",
]
