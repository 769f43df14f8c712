def optional_component_not_installed(
    component: str, dep_group: str, source_error: Exception
):
    """Throws an :class:`ImportError` naming the dependency group to install

    Args:
        component (str): The module or feature that needs the missing package
        dep_group (str): The group that the ``component`` belongs to
            (see ``project.optional-dependencies`` in ``pyproject.toml``)
        source_error (Exception): The original exception raised when importing

    Raises:
        ImportError: With a description of ways of installing.
    """
    raise ImportError(
        f"Failed to import '{component}', "
        "which is an optional component in NUQS.\n"
        f"Run 'pip install 'nuqs[{dep_group}]'' "
        "to install the required dependencies and make this component available.\n"
        f"(Original error: {str(source_error)})"
    ) from source_error
