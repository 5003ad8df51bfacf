// Classical modular polynomial coefficient tables, levels 1..5.
// Generated by tools/gen_modular_tables.py (Kronecker product of
// (X - j((a*tau+b)/d)) over a*d = N, reduced against the integer
// q-expansion of j).  Do not edit by hand; rerun the script.

#include "modular_poly_tables.hpp"

namespace ecw::detail {

const ModularPolyEntry kPhi1[] = {
    {1, 0, 1.0, "1"},
    {0, 1, -1.0, "-1"},
};
const std::size_t kPhi1Count = 2;
const int kPhi1Degree = 1;

const ModularPolyEntry kPhi2[] = {
    {3, 0, 1.0, "1"},
    {2, 2, -1.0, "-1"},
    {2, 1, 1488.0, "1488"},
    {2, 0, -162000.0, "-162000"},
    {1, 2, 1488.0, "1488"},
    {1, 1, 40773375.0, "40773375"},
    {1, 0, 8748000000.0, "8748000000"},
    {0, 3, 1.0, "1"},
    {0, 2, -162000.0, "-162000"},
    {0, 1, 8748000000.0, "8748000000"},
    {0, 0, -157464000000000.0, "-157464000000000"},
};
const std::size_t kPhi2Count = 11;
const int kPhi2Degree = 3;

const ModularPolyEntry kPhi3[] = {
    {4, 0, 1.0, "1"},
    {3, 3, -1.0, "-1"},
    {3, 2, 2232.0, "2232"},
    {3, 1, -1069956.0, "-1069956"},
    {3, 0, 36864000.0, "36864000"},
    {2, 3, 2232.0, "2232"},
    {2, 2, 2587918086.0, "2587918086"},
    {2, 1, 8900222976000.0, "8900222976000"},
    {2, 0, 452984832000000.0, "452984832000000"},
    {1, 3, -1069956.0, "-1069956"},
    {1, 2, 8900222976000.0, "8900222976000"},
    {1, 1, -7.70845966336e+17, "-770845966336000000"},
    {1, 0, 1.855425871872e+21, "1855425871872000000000"},
    {0, 4, 1.0, "1"},
    {0, 3, 36864000.0, "36864000"},
    {0, 2, 452984832000000.0, "452984832000000"},
    {0, 1, 1.855425871872e+21, "1855425871872000000000"},
};
const std::size_t kPhi3Count = 17;
const int kPhi3Degree = 4;

const ModularPolyEntry kPhi4[] = {
    {6, 0, 1.0, "1"},
    {5, 4, -1.0, "-1"},
    {5, 3, 2976.0, "2976"},
    {5, 2, -2533680.0, "-2533680"},
    {5, 1, 561444609.0, "561444609"},
    {5, 0, -8507430000.0, "-8507430000"},
    {4, 5, -1.0, "-1"},
    {4, 4, 7440.0, "7440"},
    {4, 3, 80967606480.0, "80967606480"},
    {4, 2, 1425220456750080.0, "1425220456750080"},
    {4, 1, 1.19422724410998e+18, "1194227244109980000"},
    {4, 0, 2.412547471685475e+19, "24125474716854750000"},
    {3, 5, 2976.0, "2976"},
    {3, 4, 80967606480.0, "80967606480"},
    {3, 3, 2729942049541120.0, "2729942049541120"},
    {3, 2, -9.143625507061033e+20, "-914362550706103200000"},
    {3, 1, 1.2519806366846424e+25, "12519806366846423598750000"},
    {3, 0, -2.280518035154803e+28, "-22805180351548032195000000000"},
    {2, 5, -2533680.0, "-2533680"},
    {2, 4, 1425220456750080.0, "1425220456750080"},
    {2, 3, -9.143625507061033e+20, "-914362550706103200000"},
    {2, 2, 2.640231483996941e+25, "26402314839969410496000000"},
    {2, 1, 1.8865663946499844e+29, "188656639464998455284287109375"},
    {2, 0, 1.5801023694795377e+32, "158010236947953767724187500000000"},
    {1, 5, 561444609.0, "561444609"},
    {1, 4, 1.19422724410998e+18, "1194227244109980000"},
    {1, 3, 1.2519806366846424e+25, "12519806366846423598750000"},
    {1, 2, 1.8865663946499844e+29, "188656639464998455284287109375"},
    {1, 1, -9.42665830632234e+31, "-94266583063223403127324218750000"},
    {1, 0, -3.649363277967576e+35, "-364936327796757658404375000000000000"},
    {0, 6, 1.0, "1"},
    {0, 5, -8507430000.0, "-8507430000"},
    {0, 4, 2.412547471685475e+19, "24125474716854750000"},
    {0, 3, -2.280518035154803e+28, "-22805180351548032195000000000"},
    {0, 2, 1.5801023694795377e+32, "158010236947953767724187500000000"},
    {0, 1, -3.649363277967576e+35, "-364936327796757658404375000000000000"},
    {0, 0, 2.809493747221954e+38, "280949374722195372109640625000000000000"},
};
const std::size_t kPhi4Count = 37;
const int kPhi4Degree = 6;

const ModularPolyEntry kPhi5[] = {
    {6, 0, 1.0, "1"},
    {5, 5, -1.0, "-1"},
    {5, 4, 3720.0, "3720"},
    {5, 3, -4550940.0, "-4550940"},
    {5, 2, 2028551200.0, "2028551200"},
    {5, 1, -246683410950.0, "-246683410950"},
    {5, 0, 1963211489280.0, "1963211489280"},
    {4, 5, 3720.0, "3720"},
    {4, 4, 1665999364600.0, "1665999364600"},
    {4, 3, 1.078789281853368e+17, "107878928185336800"},
    {4, 2, 3.830836097798112e+20, "383083609779811215375"},
    {4, 1, 1.2854179890682882e+23, "128541798906828816384000"},
    {4, 0, 1.2847331328414245e+24, "1284733132841424456253440"},
    {3, 5, -4550940.0, "-4550940"},
    {3, 4, 1.078789281853368e+17, "107878928185336800"},
    {3, 3, -4.4120696551291485e+23, "-441206965512914835246100"},
    {3, 2, 2.689848885838073e+28, "26898488858380731577417728000"},
    {3, 1, -1.924579346189283e+32, "-192457934618928299655108231168000"},
    {3, 0, 2.8024477782843954e+35, "280244777828439527804321565297868800"},
    {2, 5, 2028551200.0, "2028551200"},
    {2, 4, 3.830836097798112e+20, "383083609779811215375"},
    {2, 3, 2.689848885838073e+28, "26898488858380731577417728000"},
    {2, 2, 5.110941777552418e+33, "5110941777552418083110765199360000"},
    {2, 1, 3.655473658394963e+37, "36554736583949629295706472332656640000"},
    {2, 0, 6.692500042627998e+39, "6692500042627997708487149415015068467200"},
    {1, 5, -246683410950.0, "-246683410950"},
    {1, 4, 1.2854179890682882e+23, "128541798906828816384000"},
    {1, 3, -1.924579346189283e+32, "-192457934618928299655108231168000"},
    {1, 2, 3.655473658394963e+37, "36554736583949629295706472332656640000"},
    {1, 1, -2.640734570766206e+41, "-264073457076620596259715790247978782949376"},
    {1, 0, 5.327433080342442e+43, "53274330803424425450420160273356509151232000"},
    {0, 6, 1.0, "1"},
    {0, 5, 1963211489280.0, "1963211489280"},
    {0, 4, 1.2847331328414245e+24, "1284733132841424456253440"},
    {0, 3, 2.8024477782843954e+35, "280244777828439527804321565297868800"},
    {0, 2, 6.692500042627998e+39, "6692500042627997708487149415015068467200"},
    {0, 1, 5.327433080342442e+43, "53274330803424425450420160273356509151232000"},
    {0, 0, 1.4135994715472136e+47, "141359947154721358697753474691071362751004672000"},
};
const std::size_t kPhi5Count = 38;
const int kPhi5Degree = 6;

} // namespace ecw::detail
