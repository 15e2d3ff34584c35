#include "core/marching_cubes.hpp"

namespace scn {

const int mc_corner_offset[8][3] = {
{0,0,0},{1,0,0},{1,1,0},{0,1,0},{0,0,1},{1,0,1},{1,1,1},{0,1,1}};

const int mc_edge_corners[12][2] = {
{0,1},{1,2},{2,3},{3,0},{4,5},{5,6},{6,7},{7,4},{0,4},{1,5},{2,6},{3,7}};

const uint16_t mc_edge_table[256] = {
    0x0000, 0x0109, 0x0203, 0x030a, 0x0406, 0x050f, 0x0605, 0x070c,
    0x080c, 0x0905, 0x0a0f, 0x0b06, 0x0c0a, 0x0d03, 0x0e09, 0x0f00,
    0x0190, 0x0099, 0x0393, 0x029a, 0x0596, 0x049f, 0x0795, 0x069c,
    0x099c, 0x0895, 0x0b9f, 0x0a96, 0x0d9a, 0x0c93, 0x0f99, 0x0e90,
    0x0230, 0x0339, 0x0033, 0x013a, 0x0636, 0x073f, 0x0435, 0x053c,
    0x0a3c, 0x0b35, 0x083f, 0x0936, 0x0e3a, 0x0f33, 0x0c39, 0x0d30,
    0x03a0, 0x02a9, 0x01a3, 0x00aa, 0x07a6, 0x06af, 0x05a5, 0x04ac,
    0x0bac, 0x0aa5, 0x09af, 0x08a6, 0x0faa, 0x0ea3, 0x0da9, 0x0ca0,
    0x0460, 0x0569, 0x0663, 0x076a, 0x0066, 0x016f, 0x0265, 0x036c,
    0x0c6c, 0x0d65, 0x0e6f, 0x0f66, 0x086a, 0x0963, 0x0a69, 0x0b60,
    0x05f0, 0x04f9, 0x07f3, 0x06fa, 0x01f6, 0x00ff, 0x03f5, 0x02fc,
    0x0dfc, 0x0cf5, 0x0fff, 0x0ef6, 0x09fa, 0x08f3, 0x0bf9, 0x0af0,
    0x0650, 0x0759, 0x0453, 0x055a, 0x0256, 0x035f, 0x0055, 0x015c,
    0x0e5c, 0x0f55, 0x0c5f, 0x0d56, 0x0a5a, 0x0b53, 0x0859, 0x0950,
    0x07c0, 0x06c9, 0x05c3, 0x04ca, 0x03c6, 0x02cf, 0x01c5, 0x00cc,
    0x0fcc, 0x0ec5, 0x0dcf, 0x0cc6, 0x0bca, 0x0ac3, 0x09c9, 0x08c0,
    0x08c0, 0x09c9, 0x0ac3, 0x0bca, 0x0cc6, 0x0dcf, 0x0ec5, 0x0fcc,
    0x00cc, 0x01c5, 0x02cf, 0x03c6, 0x04ca, 0x05c3, 0x06c9, 0x07c0,
    0x0950, 0x0859, 0x0b53, 0x0a5a, 0x0d56, 0x0c5f, 0x0f55, 0x0e5c,
    0x015c, 0x0055, 0x035f, 0x0256, 0x055a, 0x0453, 0x0759, 0x0650,
    0x0af0, 0x0bf9, 0x08f3, 0x09fa, 0x0ef6, 0x0fff, 0x0cf5, 0x0dfc,
    0x02fc, 0x03f5, 0x00ff, 0x01f6, 0x06fa, 0x07f3, 0x04f9, 0x05f0,
    0x0b60, 0x0a69, 0x0963, 0x086a, 0x0f66, 0x0e6f, 0x0d65, 0x0c6c,
    0x036c, 0x0265, 0x016f, 0x0066, 0x076a, 0x0663, 0x0569, 0x0460,
    0x0ca0, 0x0da9, 0x0ea3, 0x0faa, 0x08a6, 0x09af, 0x0aa5, 0x0bac,
    0x04ac, 0x05a5, 0x06af, 0x07a6, 0x00aa, 0x01a3, 0x02a9, 0x03a0,
    0x0d30, 0x0c39, 0x0f33, 0x0e3a, 0x0936, 0x083f, 0x0b35, 0x0a3c,
    0x053c, 0x0435, 0x073f, 0x0636, 0x013a, 0x0033, 0x0339, 0x0230,
    0x0e90, 0x0f99, 0x0c93, 0x0d9a, 0x0a96, 0x0b9f, 0x0895, 0x099c,
    0x069c, 0x0795, 0x049f, 0x0596, 0x029a, 0x0393, 0x0099, 0x0190,
    0x0f00, 0x0e09, 0x0d03, 0x0c0a, 0x0b06, 0x0a0f, 0x0905, 0x080c,
    0x070c, 0x0605, 0x050f, 0x0406, 0x030a, 0x0203, 0x0109, 0x0000,
};

const int8_t mc_tri_table[256][16] = {
    {-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {0,3,8,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {9,1,0,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {1,3,8,1,8,9,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {10,2,1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {0,3,8,10,2,1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {9,10,2,9,2,0,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {2,3,8,2,8,9,2,9,10,-1,-1,-1,-1,-1,-1,-1},
    {11,3,2,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {0,2,11,0,11,8,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {9,1,0,11,3,2,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {1,2,11,1,11,8,1,8,9,-1,-1,-1,-1,-1,-1,-1},
    {10,11,3,10,3,1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {0,1,10,0,10,11,0,11,8,-1,-1,-1,-1,-1,-1,-1},
    {9,10,11,9,11,3,9,3,0,-1,-1,-1,-1,-1,-1,-1},
    {8,9,10,8,10,11,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {8,7,4,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {0,3,7,0,7,4,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {9,1,0,8,7,4,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {1,3,7,1,7,4,1,4,9,-1,-1,-1,-1,-1,-1,-1},
    {10,2,1,8,7,4,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {0,3,7,0,7,4,10,2,1,-1,-1,-1,-1,-1,-1,-1},
    {9,10,2,9,2,0,8,7,4,-1,-1,-1,-1,-1,-1,-1},
    {2,3,7,2,7,4,2,4,9,2,9,10,-1,-1,-1,-1},
    {11,3,2,8,7,4,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {0,2,11,0,11,7,0,7,4,-1,-1,-1,-1,-1,-1,-1},
    {9,1,0,11,3,2,8,7,4,-1,-1,-1,-1,-1,-1,-1},
    {1,2,11,1,11,7,1,7,4,1,4,9,-1,-1,-1,-1},
    {10,11,3,10,3,1,8,7,4,-1,-1,-1,-1,-1,-1,-1},
    {0,1,10,0,10,11,0,11,7,0,7,4,-1,-1,-1,-1},
    {9,10,11,9,11,3,9,3,0,8,7,4,-1,-1,-1,-1},
    {9,10,11,9,11,7,9,7,4,-1,-1,-1,-1,-1,-1,-1},
    {4,5,9,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {0,3,8,4,5,9,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {4,5,1,4,1,0,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {1,3,8,1,8,4,1,4,5,-1,-1,-1,-1,-1,-1,-1},
    {10,2,1,4,5,9,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {0,3,8,10,2,1,4,5,9,-1,-1,-1,-1,-1,-1,-1},
    {4,5,10,4,10,2,4,2,0,-1,-1,-1,-1,-1,-1,-1},
    {2,3,8,2,8,4,2,4,5,2,5,10,-1,-1,-1,-1},
    {11,3,2,4,5,9,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {0,2,11,0,11,8,4,5,9,-1,-1,-1,-1,-1,-1,-1},
    {4,5,1,4,1,0,11,3,2,-1,-1,-1,-1,-1,-1,-1},
    {1,2,11,1,11,8,1,8,4,1,4,5,-1,-1,-1,-1},
    {10,11,3,10,3,1,4,5,9,-1,-1,-1,-1,-1,-1,-1},
    {0,1,10,0,10,11,0,11,8,4,5,9,-1,-1,-1,-1},
    {4,5,10,4,10,11,4,11,3,4,3,0,-1,-1,-1,-1},
    {4,5,10,4,10,11,4,11,8,-1,-1,-1,-1,-1,-1,-1},
    {9,8,7,9,7,5,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {0,3,7,0,7,5,0,5,9,-1,-1,-1,-1,-1,-1,-1},
    {8,7,5,8,5,1,8,1,0,-1,-1,-1,-1,-1,-1,-1},
    {1,3,7,1,7,5,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {10,2,1,9,8,7,9,7,5,-1,-1,-1,-1,-1,-1,-1},
    {0,3,7,0,7,5,0,5,9,10,2,1,-1,-1,-1,-1},
    {8,7,5,8,5,10,8,10,2,8,2,0,-1,-1,-1,-1},
    {2,3,7,2,7,5,2,5,10,-1,-1,-1,-1,-1,-1,-1},
    {11,3,2,9,8,7,9,7,5,-1,-1,-1,-1,-1,-1,-1},
    {0,2,11,0,11,7,0,7,5,0,5,9,-1,-1,-1,-1},
    {8,7,5,8,5,1,8,1,0,11,3,2,-1,-1,-1,-1},
    {1,2,11,1,11,7,1,7,5,-1,-1,-1,-1,-1,-1,-1},
    {10,11,3,10,3,1,9,8,7,9,7,5,-1,-1,-1,-1},
    {0,1,10,0,10,11,0,11,7,0,7,5,0,5,9,-1},
    {8,7,5,8,5,10,8,10,11,8,11,3,8,3,0,-1},
    {10,11,7,10,7,5,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {5,6,10,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {0,3,8,5,6,10,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {9,1,0,5,6,10,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {1,3,8,1,8,9,5,6,10,-1,-1,-1,-1,-1,-1,-1},
    {5,6,2,5,2,1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {0,3,8,5,6,2,5,2,1,-1,-1,-1,-1,-1,-1,-1},
    {9,5,6,9,6,2,9,2,0,-1,-1,-1,-1,-1,-1,-1},
    {2,3,8,2,8,9,2,9,5,2,5,6,-1,-1,-1,-1},
    {11,3,2,5,6,10,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {0,2,11,0,11,8,5,6,10,-1,-1,-1,-1,-1,-1,-1},
    {9,1,0,11,3,2,5,6,10,-1,-1,-1,-1,-1,-1,-1},
    {1,2,11,1,11,8,1,8,9,5,6,10,-1,-1,-1,-1},
    {5,6,11,5,11,3,5,3,1,-1,-1,-1,-1,-1,-1,-1},
    {0,1,5,0,5,6,0,6,11,0,11,8,-1,-1,-1,-1},
    {9,5,6,9,6,11,9,11,3,9,3,0,-1,-1,-1,-1},
    {5,6,11,5,11,8,5,8,9,-1,-1,-1,-1,-1,-1,-1},
    {8,7,4,5,6,10,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {0,3,7,0,7,4,5,6,10,-1,-1,-1,-1,-1,-1,-1},
    {9,1,0,8,7,4,5,6,10,-1,-1,-1,-1,-1,-1,-1},
    {1,3,7,1,7,4,1,4,9,5,6,10,-1,-1,-1,-1},
    {5,6,2,5,2,1,8,7,4,-1,-1,-1,-1,-1,-1,-1},
    {0,3,7,0,7,4,5,6,2,5,2,1,-1,-1,-1,-1},
    {9,5,6,9,6,2,9,2,0,8,7,4,-1,-1,-1,-1},
    {2,3,7,2,7,4,2,4,9,2,9,5,2,5,6,-1},
    {11,3,2,8,7,4,5,6,10,-1,-1,-1,-1,-1,-1,-1},
    {0,2,11,0,11,7,0,7,4,5,6,10,-1,-1,-1,-1},
    {9,1,0,11,3,2,8,7,4,5,6,10,-1,-1,-1,-1},
    {1,2,11,1,11,7,1,7,4,1,4,9,5,6,10,-1},
    {5,6,11,5,11,3,5,3,1,8,7,4,-1,-1,-1,-1},
    {0,1,5,0,5,6,0,6,11,0,11,7,0,7,4,-1},
    {9,5,6,9,6,11,9,11,3,9,3,0,8,7,4,-1},
    {9,5,6,9,6,11,9,11,7,9,7,4,-1,-1,-1,-1},
    {4,6,10,4,10,9,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {0,3,8,4,6,10,4,10,9,-1,-1,-1,-1,-1,-1,-1},
    {4,6,10,4,10,1,4,1,0,-1,-1,-1,-1,-1,-1,-1},
    {1,3,8,1,8,4,1,4,6,1,6,10,-1,-1,-1,-1},
    {9,4,6,9,6,2,9,2,1,-1,-1,-1,-1,-1,-1,-1},
    {0,3,8,9,4,6,9,6,2,9,2,1,-1,-1,-1,-1},
    {4,6,2,4,2,0,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {2,3,8,2,8,4,2,4,6,-1,-1,-1,-1,-1,-1,-1},
    {11,3,2,4,6,10,4,10,9,-1,-1,-1,-1,-1,-1,-1},
    {0,2,11,0,11,8,4,6,10,4,10,9,-1,-1,-1,-1},
    {4,6,10,4,10,1,4,1,0,11,3,2,-1,-1,-1,-1},
    {1,2,11,1,11,8,1,8,4,1,4,6,1,6,10,-1},
    {9,4,6,9,6,11,9,11,3,9,3,1,-1,-1,-1,-1},
    {0,1,9,0,9,4,0,4,6,0,6,11,0,11,8,-1},
    {4,6,11,4,11,3,4,3,0,-1,-1,-1,-1,-1,-1,-1},
    {4,6,11,4,11,8,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {10,9,8,10,8,7,10,7,6,-1,-1,-1,-1,-1,-1,-1},
    {0,3,7,0,7,6,0,6,10,0,10,9,-1,-1,-1,-1},
    {8,7,6,8,6,10,8,10,1,8,1,0,-1,-1,-1,-1},
    {1,3,7,1,7,6,1,6,10,-1,-1,-1,-1,-1,-1,-1},
    {9,8,7,9,7,6,9,6,2,9,2,1,-1,-1,-1,-1},
    {0,3,7,0,7,6,0,6,2,0,2,1,0,1,9,-1},
    {8,7,6,8,6,2,8,2,0,-1,-1,-1,-1,-1,-1,-1},
    {2,3,7,2,7,6,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {11,3,2,10,9,8,10,8,7,10,7,6,-1,-1,-1,-1},
    {0,2,11,0,11,7,0,7,6,0,6,10,0,10,9,-1},
    {8,7,6,8,6,10,8,10,1,8,1,0,11,3,2,-1},
    {1,2,11,1,11,7,1,7,6,1,6,10,-1,-1,-1,-1},
    {9,8,7,9,7,6,9,6,11,9,11,3,9,3,1,-1},
    {0,1,9,11,7,6,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {8,7,6,8,6,11,8,11,3,8,3,0,-1,-1,-1,-1},
    {11,7,6,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {6,7,11,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {0,3,8,6,7,11,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {9,1,0,6,7,11,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {1,3,8,1,8,9,6,7,11,-1,-1,-1,-1,-1,-1,-1},
    {10,2,1,6,7,11,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {0,3,8,10,2,1,6,7,11,-1,-1,-1,-1,-1,-1,-1},
    {9,10,2,9,2,0,6,7,11,-1,-1,-1,-1,-1,-1,-1},
    {2,3,8,2,8,9,2,9,10,6,7,11,-1,-1,-1,-1},
    {6,7,3,6,3,2,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {0,2,6,0,6,7,0,7,8,-1,-1,-1,-1,-1,-1,-1},
    {9,1,0,6,7,3,6,3,2,-1,-1,-1,-1,-1,-1,-1},
    {1,2,6,1,6,7,1,7,8,1,8,9,-1,-1,-1,-1},
    {10,6,7,10,7,3,10,3,1,-1,-1,-1,-1,-1,-1,-1},
    {0,1,10,0,10,6,0,6,7,0,7,8,-1,-1,-1,-1},
    {9,10,6,9,6,7,9,7,3,9,3,0,-1,-1,-1,-1},
    {6,7,8,6,8,9,6,9,10,-1,-1,-1,-1,-1,-1,-1},
    {8,11,6,8,6,4,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {0,3,11,0,11,6,0,6,4,-1,-1,-1,-1,-1,-1,-1},
    {9,1,0,8,11,6,8,6,4,-1,-1,-1,-1,-1,-1,-1},
    {1,3,11,1,11,6,1,6,4,1,4,9,-1,-1,-1,-1},
    {10,2,1,8,11,6,8,6,4,-1,-1,-1,-1,-1,-1,-1},
    {0,3,11,0,11,6,0,6,4,10,2,1,-1,-1,-1,-1},
    {9,10,2,9,2,0,8,11,6,8,6,4,-1,-1,-1,-1},
    {2,3,11,2,11,6,2,6,4,2,4,9,2,9,10,-1},
    {6,4,8,6,8,3,6,3,2,-1,-1,-1,-1,-1,-1,-1},
    {0,2,6,0,6,4,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {9,1,0,6,4,8,6,8,3,6,3,2,-1,-1,-1,-1},
    {1,2,6,1,6,4,1,4,9,-1,-1,-1,-1,-1,-1,-1},
    {10,6,4,10,4,8,10,8,3,10,3,1,-1,-1,-1,-1},
    {0,1,10,0,10,6,0,6,4,-1,-1,-1,-1,-1,-1,-1},
    {9,10,6,9,6,4,9,4,8,9,8,3,9,3,0,-1},
    {9,10,6,9,6,4,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {4,5,9,6,7,11,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {0,3,8,4,5,9,6,7,11,-1,-1,-1,-1,-1,-1,-1},
    {4,5,1,4,1,0,6,7,11,-1,-1,-1,-1,-1,-1,-1},
    {1,3,8,1,8,4,1,4,5,6,7,11,-1,-1,-1,-1},
    {10,2,1,4,5,9,6,7,11,-1,-1,-1,-1,-1,-1,-1},
    {0,3,8,10,2,1,4,5,9,6,7,11,-1,-1,-1,-1},
    {4,5,10,4,10,2,4,2,0,6,7,11,-1,-1,-1,-1},
    {2,3,8,2,8,4,2,4,5,2,5,10,6,7,11,-1},
    {6,7,3,6,3,2,4,5,9,-1,-1,-1,-1,-1,-1,-1},
    {0,2,6,0,6,7,0,7,8,4,5,9,-1,-1,-1,-1},
    {4,5,1,4,1,0,6,7,3,6,3,2,-1,-1,-1,-1},
    {1,2,6,1,6,7,1,7,8,1,8,4,1,4,5,-1},
    {10,6,7,10,7,3,10,3,1,4,5,9,-1,-1,-1,-1},
    {0,1,10,0,10,6,0,6,7,0,7,8,4,5,9,-1},
    {4,5,10,4,10,6,4,6,7,4,7,3,4,3,0,-1},
    {4,5,10,4,10,6,4,6,7,4,7,8,-1,-1,-1,-1},
    {9,8,11,9,11,6,9,6,5,-1,-1,-1,-1,-1,-1,-1},
    {0,3,11,0,11,6,0,6,5,0,5,9,-1,-1,-1,-1},
    {8,11,6,8,6,5,8,5,1,8,1,0,-1,-1,-1,-1},
    {1,3,11,1,11,6,1,6,5,-1,-1,-1,-1,-1,-1,-1},
    {10,2,1,9,8,11,9,11,6,9,6,5,-1,-1,-1,-1},
    {0,3,11,0,11,6,0,6,5,0,5,9,10,2,1,-1},
    {8,11,6,8,6,5,8,5,10,8,10,2,8,2,0,-1},
    {2,3,11,2,11,6,2,6,5,2,5,10,-1,-1,-1,-1},
    {6,5,9,6,9,8,6,8,3,6,3,2,-1,-1,-1,-1},
    {0,2,6,0,6,5,0,5,9,-1,-1,-1,-1,-1,-1,-1},
    {8,3,2,8,2,6,8,6,5,8,5,1,8,1,0,-1},
    {1,2,6,1,6,5,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {10,6,5,10,5,9,10,9,8,10,8,3,10,3,1,-1},
    {0,1,10,0,10,6,0,6,5,0,5,9,-1,-1,-1,-1},
    {8,3,0,10,6,5,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {10,6,5,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {5,7,11,5,11,10,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {0,3,8,5,7,11,5,11,10,-1,-1,-1,-1,-1,-1,-1},
    {9,1,0,5,7,11,5,11,10,-1,-1,-1,-1,-1,-1,-1},
    {1,3,8,1,8,9,5,7,11,5,11,10,-1,-1,-1,-1},
    {5,7,11,5,11,2,5,2,1,-1,-1,-1,-1,-1,-1,-1},
    {0,3,8,5,7,11,5,11,2,5,2,1,-1,-1,-1,-1},
    {9,5,7,9,7,11,9,11,2,9,2,0,-1,-1,-1,-1},
    {2,3,8,2,8,9,2,9,5,2,5,7,2,7,11,-1},
    {10,5,7,10,7,3,10,3,2,-1,-1,-1,-1,-1,-1,-1},
    {0,2,10,0,10,5,0,5,7,0,7,8,-1,-1,-1,-1},
    {9,1,0,10,5,7,10,7,3,10,3,2,-1,-1,-1,-1},
    {1,2,10,1,10,5,1,5,7,1,7,8,1,8,9,-1},
    {5,7,3,5,3,1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {0,1,5,0,5,7,0,7,8,-1,-1,-1,-1,-1,-1,-1},
    {9,5,7,9,7,3,9,3,0,-1,-1,-1,-1,-1,-1,-1},
    {5,7,8,5,8,9,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {8,11,10,8,10,5,8,5,4,-1,-1,-1,-1,-1,-1,-1},
    {0,3,11,0,11,10,0,10,5,0,5,4,-1,-1,-1,-1},
    {9,1,0,8,11,10,8,10,5,8,5,4,-1,-1,-1,-1},
    {1,3,11,1,11,10,1,10,5,1,5,4,1,4,9,-1},
    {5,4,8,5,8,11,5,11,2,5,2,1,-1,-1,-1,-1},
    {0,3,11,0,11,2,0,2,1,0,1,5,0,5,4,-1},
    {9,5,4,9,4,8,9,8,11,9,11,2,9,2,0,-1},
    {2,3,11,9,5,4,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {10,5,4,10,4,8,10,8,3,10,3,2,-1,-1,-1,-1},
    {0,2,10,0,10,5,0,5,4,-1,-1,-1,-1,-1,-1,-1},
    {9,1,0,10,5,4,10,4,8,10,8,3,10,3,2,-1},
    {1,2,10,1,10,5,1,5,4,1,4,9,-1,-1,-1,-1},
    {5,4,8,5,8,3,5,3,1,-1,-1,-1,-1,-1,-1,-1},
    {0,1,5,0,5,4,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {9,5,4,9,4,8,9,8,3,9,3,0,-1,-1,-1,-1},
    {9,5,4,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {4,7,11,4,11,10,4,10,9,-1,-1,-1,-1,-1,-1,-1},
    {0,3,8,4,7,11,4,11,10,4,10,9,-1,-1,-1,-1},
    {4,7,11,4,11,10,4,10,1,4,1,0,-1,-1,-1,-1},
    {1,3,8,1,8,4,1,4,7,1,7,11,1,11,10,-1},
    {9,4,7,9,7,11,9,11,2,9,2,1,-1,-1,-1,-1},
    {0,3,8,9,4,7,9,7,11,9,11,2,9,2,1,-1},
    {4,7,11,4,11,2,4,2,0,-1,-1,-1,-1,-1,-1,-1},
    {2,3,8,2,8,4,2,4,7,2,7,11,-1,-1,-1,-1},
    {10,9,4,10,4,7,10,7,3,10,3,2,-1,-1,-1,-1},
    {0,2,10,0,10,9,0,9,4,0,4,7,0,7,8,-1},
    {4,7,3,4,3,2,4,2,10,4,10,1,4,1,0,-1},
    {1,2,10,4,7,8,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {9,4,7,9,7,3,9,3,1,-1,-1,-1,-1,-1,-1,-1},
    {0,1,9,0,9,4,0,4,7,0,7,8,-1,-1,-1,-1},
    {4,7,3,4,3,0,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {4,7,8,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {11,10,9,11,9,8,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {0,3,11,0,11,10,0,10,9,-1,-1,-1,-1,-1,-1,-1},
    {8,11,10,8,10,1,8,1,0,-1,-1,-1,-1,-1,-1,-1},
    {1,3,11,1,11,10,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {9,8,11,9,11,2,9,2,1,-1,-1,-1,-1,-1,-1,-1},
    {0,3,11,0,11,2,0,2,1,0,1,9,-1,-1,-1,-1},
    {8,11,2,8,2,0,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {2,3,11,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {10,9,8,10,8,3,10,3,2,-1,-1,-1,-1,-1,-1,-1},
    {0,2,10,0,10,9,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {8,3,2,8,2,10,8,10,1,8,1,0,-1,-1,-1,-1},
    {1,2,10,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {9,8,3,9,3,1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {0,1,9,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {8,3,0,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
    {-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1},
};

}  // namespace scn