from algorithms.base import CentralizedFL


class FedAvg(CentralizedFL):
    """
    Federated averaging: the base client and server with no overrides
    """
    name = "fedavg"
