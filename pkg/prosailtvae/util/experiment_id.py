def generate_experiment_id(name: str,
                           seed: int = None, n: int = None, epochs: int = None,
                           d_model: int = None, num_layers: int = None,
                           beta_end: float = None, noise: float = None):
    """Creates a standardized experiment name.

    The format is
        {name}_s-{seed}_n-{n}_e-{epochs}_w-{d_model}_l-{num_layers}_b-{beta_end}_z-{noise}
    Note that parts are only added when not None.

    Args:
        name (str): the name of the experiment.
        seed (int, optional): the random seed.
        n (int, optional): the number of simulated training samples.
        epochs (int, optional): the number of training epochs.
        d_model (int, optional): the encoder token width.
        num_layers (int, optional): the number of encoder blocks.
        beta_end (float, optional): the final KL weight.
        noise (float, optional): the simulated band noise level.

    Returns:
        str: the experiment identifier
    """
    experiment_id = f"{name.lower()}"
    if isinstance(seed, int):
        experiment_id += f"_s-{seed}"
    if isinstance(n, int):
        experiment_id += f"_n-{n}"
    if isinstance(epochs, int):
        experiment_id += f"_e-{epochs}"
    if isinstance(d_model, int):
        experiment_id += f"_w-{d_model}"
    if isinstance(num_layers, int):
        experiment_id += f"_l-{num_layers}"
    if isinstance(beta_end, (int, float)):
        experiment_id += f"_b-{beta_end:g}"
    if isinstance(noise, (int, float)):
        experiment_id += f"_z-{noise:g}"

    return experiment_id
