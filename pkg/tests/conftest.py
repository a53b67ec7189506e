import numpy as np
import pytest


@pytest.fixture
def tiny_dag():
    """The worked 4-node example used across the suite: parents
    1<-[0,0], 2<-[1,0], 3<-[2,1]."""
    from recdag.graph_model import KDag

    parents = np.array([[0, 0], [1, 0], [2, 1]], dtype=np.uint32)
    return KDag(n=3, k=2, mode="with-replacement", seed=0, parents=parents)
