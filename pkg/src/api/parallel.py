#!/usr/bin/env python3
"""
Volterra LDP - Paralelismo e Fluxos Aleatórios

Os caminhos são gerados em blocos de tamanho fixo. O bloco b usa o gerador
PCG64 derivado de SeedSequence(seed, spawn_key=(b,)), de modo que a amostra
depende apenas de (seed, bloco) e não do número de threads. Os resultados
por bloco são recombinados na ordem dos blocos.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, Sequence, TypeVar

from numpy.random import PCG64, Generator, SeedSequence

T = TypeVar("T")
R = TypeVar("R")

# Tamanho fixo do bloco de caminhos; faz parte do contrato de reprodutibilidade
BLOCK_SIZE = 4096


def resolve_threads(threads: Optional[int]) -> int:
    """Número de workers: o valor pedido ou os núcleos disponíveis."""
    if threads is None or threads <= 0:
        return os.cpu_count() or 1
    return int(threads)


def split_blocks(paths: int, block_size: int = BLOCK_SIZE) -> List[int]:
    """Tamanhos dos blocos que somam `paths` (o último pode ser menor)."""
    paths = int(paths)
    block_size = int(max(1, block_size))
    sizes = []
    done = 0
    while done < paths:
        take = min(block_size, paths - done)
        sizes.append(take)
        done += take
    return sizes


def block_generator(seed: int, block: int) -> Generator:
    """Gerador independente do bloco `block`, derivado de `seed`."""
    return Generator(PCG64(SeedSequence(int(seed), spawn_key=(int(block),))))


def child_seeds(seed: int, count: int) -> List[int]:
    """Sub-sementes determinísticas (ex.: partidas aleatórias do otimizador)."""
    kids = SeedSequence(int(seed)).spawn(int(count))
    return [int(k.generate_state(1)[0]) for k in kids]


def ordered_map(func: Callable[[T], R], items: Sequence[T] | Iterable[T], threads: Optional[int] = None) -> List[R]:
    """
    Aplica func em paralelo e devolve os resultados na ordem de entrada.

    Com uma única thread roda em série, sem criar o executor.
    """
    items = list(items)
    workers = min(resolve_threads(threads), max(len(items), 1))
    if workers <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
