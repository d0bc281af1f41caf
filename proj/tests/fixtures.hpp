#pragma once

// Hand-checked reference tables for the 8 square orientations.
// kComposeRef[i][j] is the label of "apply j, then i"; kInverseActionRef
// undoes it: kInverseActionRef[i][kComposeRef[i][j]] == j. They differ only
// in rows 5 and 6 because rot90 and rot270 are each other's inverse.

inline constexpr int kComposeRef[8][8] = {
    {0, 1, 2, 3, 4, 5, 6, 7},
    {1, 0, 3, 2, 5, 4, 7, 6},
    {2, 3, 0, 1, 6, 7, 4, 5},
    {3, 2, 1, 0, 7, 6, 5, 4},
    {4, 6, 5, 7, 0, 2, 1, 3},
    {5, 7, 4, 6, 1, 3, 0, 2},
    {6, 4, 7, 5, 2, 0, 3, 1},
    {7, 5, 6, 4, 3, 1, 2, 0},
};

inline constexpr int kInverseActionRef[8][8] = {
    {0, 1, 2, 3, 4, 5, 6, 7},
    {1, 0, 3, 2, 5, 4, 7, 6},
    {2, 3, 0, 1, 6, 7, 4, 5},
    {3, 2, 1, 0, 7, 6, 5, 4},
    {4, 6, 5, 7, 0, 2, 1, 3},
    {6, 4, 7, 5, 2, 0, 3, 1},
    {5, 7, 4, 6, 1, 3, 0, 2},
    {7, 5, 6, 4, 3, 1, 2, 0},
};

inline constexpr int kInverseRef[8] = {0, 1, 2, 3, 4, 6, 5, 7};
