from collections import OrderedDict
from typing import Optional

from models.model_params import Gradient, ModelParams
from models.training_spec import OptimizerSpec


def sgd_step(params: ModelParams, grad: Gradient, opt: OptimizerSpec,
             velocity: Optional[ModelParams] = None) -> ModelParams:
    """
    One SGD step with momentum and L2 weight decay.

        v <- m*v + g + wd*theta
        theta <- theta - lr*v

    `velocity` is updated in place when given; without it the step is
    plain theta - lr*(g + wd*theta).
    """
    params.check_compatible(grad)
    updated = OrderedDict()
    for name, theta in params.items():
        direction = grad[name] + opt.weight_decay * theta
        if velocity is not None:
            direction = opt.momentum * velocity[name] + direction
            velocity[name] = direction
        updated[name] = theta - opt.learning_rate * direction
    return ModelParams(updated)


class SGDOptimizer:
    """
    Stateful wrapper owning the momentum buffer for one training run
    """

    def __init__(self, spec: OptimizerSpec):
        self.spec = spec
        self.velocity: Optional[ModelParams] = None
        self.steps = 0

    def step(self, params: ModelParams, grad: Gradient) -> ModelParams:
        if self.velocity is None:
            self.velocity = params.zeros_like()
        self.steps += 1
        return sgd_step(params, grad, self.spec, self.velocity)
