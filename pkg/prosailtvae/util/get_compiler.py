def get_compiler(run_eagerly, jit_compile):
    """Convert run_eagerly and jit_compile settings into a tf.function decorator

    Args:
        run_eagerly (bool): If true, do not perform any compilation
        jit_compile (bool): If true, perform jit compilations

    Raises:
        ValueError: If both run_eagerly and jit_compile are true

    Returns:
        Callable: tf.function(...) or the identity
    """
    # lazy import, the cli parses arguments before tensorflow is loaded
    import tensorflow as tf

    if run_eagerly and jit_compile:
        raise ValueError('run_eagerly must be false when jit_compile is True')
    if run_eagerly:
        return lambda fn: fn
    return tf.function(reduce_retracing=True, jit_compile=bool(jit_compile))
