from abc import ABC, abstractmethod


class IEstimationService(ABC):
    @abstractmethod
    def estimate(self, spec, init, trials: int, seed: int, save: bool = False):
        pass


class IExactService(ABC):
    @abstractmethod
    def solve(self, spec, xmax: int, with_mean_t: bool = False, both_extinct_value: float = 0.0,
              save: bool = False):
        pass


class IOdeService(ABC):
    @abstractmethod
    def trajectory(self, spec, x0: float, x1: float, dt: float, horizon: float, save: bool = False):
        pass


class ISimulationService(ABC):
    @abstractmethod
    def simulate(self, spec, init, seed: int, gillespie: bool = False, max_steps=None, save: bool = False):
        pass


class IRunRecorder(ABC):
    @abstractmethod
    def record(self, kind: str, spec, parameters: dict, seed, result: dict):
        pass
